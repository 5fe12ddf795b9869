#include "zo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "zo/errors.hpp"
#include "zo/rng.hpp"

namespace zo {

Vec DenseMatrix::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols) throw UsageError("matvec dimension mismatch");
    Vec out(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        const double* row = data.data() + static_cast<std::size_t>(r) * cols;
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

Vec DenseMatrix::apply_transpose(const Vec& v) const {
    if (static_cast<int>(v.size()) != rows) throw UsageError("matvec dimension mismatch");
    Vec out(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r) {
        const double* row = data.data() + static_cast<std::size_t>(r) * cols;
        const double vr = v[static_cast<std::size_t>(r)];
        for (int c = 0; c < cols; ++c) out[static_cast<std::size_t>(c)] += vr * row[c];
    }
    return out;
}

Vec SparseMatrix::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols) throw UsageError("matvec dimension mismatch");
    Vec out(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::int64_t k = row_offsets[static_cast<std::size_t>(r)];
             k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            acc += values[static_cast<std::size_t>(k)] *
                   x[static_cast<std::size_t>(col_indices[static_cast<std::size_t>(k)])];
        }
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

Vec SparseMatrix::apply_transpose(const Vec& v) const {
    if (static_cast<int>(v.size()) != rows) throw UsageError("matvec dimension mismatch");
    Vec out(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r) {
        const double vr = v[static_cast<std::size_t>(r)];
        for (std::int64_t k = row_offsets[static_cast<std::size_t>(r)];
             k < row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            out[static_cast<std::size_t>(col_indices[static_cast<std::size_t>(k)])] +=
                vr * values[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

namespace {

// Orthonormal columns from seeded gaussians by twice-through modified
// Gram-Schmidt; each column's largest-magnitude entry is made positive so the
// factorization is a deterministic function of the seed alone.
std::vector<Vec> orthonormal_columns(int n, int k, RngStream& rng) {
    std::vector<Vec> cols(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        Vec v(static_cast<std::size_t>(n));
        for (auto& vi : v) vi = rng.next_gaussian();
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                const double proj = dot(cols[static_cast<std::size_t>(i)], v);
                axpy(-proj, cols[static_cast<std::size_t>(i)], v);
            }
        }
        const double nv = norm2(v);
        if (nv < 1e-12) throw InternalError("rank-deficient draw in orthonormal_columns");
        scale(v, 1.0 / nv);
        int arg = 0;
        for (int i = 1; i < n; ++i) {
            if (std::abs(v[static_cast<std::size_t>(i)]) >
                std::abs(v[static_cast<std::size_t>(arg)]))
                arg = i;
        }
        if (v[static_cast<std::size_t>(arg)] < 0.0) scale(v, -1.0);
        cols[static_cast<std::size_t>(j)] = std::move(v);
    }
    return cols;
}

}  // namespace

LeastSquaresProblem least_squares_make(int d, int p, std::uint64_t seed,
                                       double condition_target) {
    if (d < 1 || p < 1) throw UsageError("least_squares_make requires d >= 1 and p >= 1");
    if (condition_target < 1.0)
        throw UsageError("least_squares_make requires condition_target >= 1");

    const int r = std::min(p, d);
    Vec sigma(static_cast<std::size_t>(r), 1.0);
    RngStream rng(seed, 0);
    if (r >= 2) {
        sigma.front() = 1.0;
        sigma.back() = condition_target;
        const double span = std::log(condition_target);
        for (int i = 1; i + 1 < r; ++i)
            sigma[static_cast<std::size_t>(i)] = std::exp(rng.next_uniform() * span);
        std::sort(sigma.begin(), sigma.end());
    }

    RngStream urng = rng.split(1);
    RngStream vrng = rng.split(2);
    const auto ucols = orthonormal_columns(p, r, urng);
    const auto vcols = orthonormal_columns(d, r, vrng);

    LeastSquaresProblem problem;
    problem.A.rows = p;
    problem.A.cols = d;
    problem.A.data.assign(static_cast<std::size_t>(p) * d, 0.0);
    for (int k = 0; k < r; ++k) {
        const double sk = sigma[static_cast<std::size_t>(k)];
        for (int i = 0; i < p; ++i) {
            const double ui = ucols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            for (int j = 0; j < d; ++j) {
                problem.A.at(i, j) +=
                    sk * ui * vcols[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            }
        }
    }

    RngStream xrng = rng.split(3);
    problem.x_star.resize(static_cast<std::size_t>(d));
    for (auto& xi : problem.x_star) xi = xrng.next_gaussian();
    problem.b = problem.A.apply(problem.x_star);
    problem.planted = true;
    return problem;
}

double power_iteration_sq(const std::function<Vec(const Vec&)>& apply,
                          const std::function<Vec(const Vec&)>& apply_t, int dim) {
    if (dim < 1) throw UsageError("power_iteration_sq requires dim >= 1");
    // Deterministic start with unequal entries so no single eigenvector of a
    // permutation-symmetric operator can absorb the whole initial mass.
    Vec v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        v[static_cast<std::size_t>(i)] = 1.0 + static_cast<double>(i) / (dim + 1.0);
    double nv = norm2(v);
    scale(v, 1.0 / nv);

    constexpr int kMaxIters = 10000;
    constexpr double kRelTol = 1e-6;
    double lambda = 0.0;
    double rel = 0.0;
    for (int it = 0; it < kMaxIters; ++it) {
        Vec w = apply_t(apply(v));
        const double wnorm = norm2(w);
        if (wnorm == 0.0) return 0.0;  // started in the null space of A^T A
        const double lambda_new = dot(v, w);
        scale(w, 1.0 / wnorm);
        v = std::move(w);
        rel = std::abs(lambda_new - lambda) / std::max(std::abs(lambda_new), 1e-300);
        if (it > 0 && rel <= kRelTol) return lambda_new;
        lambda = lambda_new;
    }
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "power iteration did not converge in %d iterations (relative change %.3e)",
                  kMaxIters, rel);
    throw EvaluationError(msg);
}

double smoothness_constant(const LeastSquaresProblem& problem) {
    const double lmax = power_iteration_sq(
        [&](const Vec& x) { return problem.A.apply(x); },
        [&](const Vec& v) { return problem.A.apply_transpose(v); }, problem.A.cols);
    return 2.0 * lmax;
}

double smoothness_constant(const LogisticRegressionProblem& problem) {
    const double lmax = power_iteration_sq(
        [&](const Vec& x) { return problem.A.apply(x); },
        [&](const Vec& v) { return problem.A.apply_transpose(v); }, problem.A.cols);
    return std::sqrt(lmax) / (4.0 * problem.A.rows);
}

namespace {

double softplus(double t) {
    // log(1 + exp(t)) without overflow for large |t|.
    if (t > 30.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

}  // namespace

Objective to_objective(const LeastSquaresProblem& problem) {
    auto shared = std::make_shared<LeastSquaresProblem>(problem);
    Objective obj;
    obj.dim = shared->A.cols;
    obj.L = smoothness_constant(*shared);
    obj.value = [shared](const Vec& x) {
        Vec r = shared->A.apply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= shared->b[i];
        return dot(r, r);
    };
    obj.grad = [shared](const Vec& x) {
        Vec r = shared->A.apply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= shared->b[i];
        Vec g = shared->A.apply_transpose(r);
        scale(g, 2.0);
        return g;
    };
    return obj;
}

Objective to_objective(const LogisticRegressionProblem& problem) {
    auto shared = std::make_shared<LogisticRegressionProblem>(problem);
    Objective obj;
    obj.dim = shared->A.cols;
    obj.L = smoothness_constant(*shared);
    const double inv_m = 1.0 / shared->A.rows;
    obj.value = [shared, inv_m](const Vec& x) {
        const Vec z = shared->A.apply(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) acc += softplus(-shared->y[i] * z[i]);
        return inv_m * acc;
    };
    obj.grad = [shared, inv_m](const Vec& x) {
        const Vec z = shared->A.apply(x);
        Vec w(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double t = shared->y[i] * z[i];
            const double s = 1.0 / (1.0 + std::exp(t));  // sigmoid(-t)
            w[i] = -shared->y[i] * s;
        }
        Vec g = shared->A.apply_transpose(w);
        scale(g, inv_m);
        return g;
    };
    return obj;
}

ReferenceSolution solve_reference(const Objective& objective, const Vec& x0, double tol) {
    if (!objective.has_grad())
        throw UsageError("solve_reference requires an objective with a gradient");
    if (objective.L <= 0.0) throw UsageError("solve_reference requires L > 0");
    if (static_cast<int>(x0.size()) != objective.dim)
        throw UsageError("solve_reference x0 dimension mismatch");

    constexpr std::int64_t kMaxIters = 1000000;
    const double eta = 1.0 / objective.L;

    Vec x = x0;
    Vec y = x0;
    double t = 1.0;
    double f_prev = objective.value(x);

    ReferenceSolution out;
    out.x = x;
    out.f = f_prev;

    for (std::int64_t k = 0; k < kMaxIters; ++k) {
        Vec g = objective.grad(y);
        const double gnorm = norm2(g);
        out.iterations = k;
        if (gnorm <= tol) {
            out.x = y;
            out.f = objective.value(y);
            out.grad_norm = gnorm;
            return out;
        }
        Vec x_next = y;
        axpy(-eta, g, x_next);
        const double f_next = objective.value(x_next);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (f_next > f_prev) {
            // Function-value restart: drop momentum and step from the best point.
            y = x;
            t = 1.0;
            continue;
        }
        Vec y_next = x_next;
        const double beta = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < y_next.size(); ++i)
            y_next[i] += beta * (x_next[i] - x[i]);
        x = std::move(x_next);
        y = std::move(y_next);
        t = t_next;
        f_prev = f_next;
    }

    Vec g = objective.grad(x);
    out.x = x;
    out.f = objective.value(x);
    out.grad_norm = norm2(g);
    out.iterations = kMaxIters;
    out.hit_cap = true;
    return out;
}

ReferenceSolution solve_reference(const LeastSquaresProblem& problem, double tol) {
    const Objective obj = to_objective(problem);
    return solve_reference(obj, Vec(static_cast<std::size_t>(obj.dim), 0.0), tol);
}

ReferenceSolution solve_reference(const LogisticRegressionProblem& problem, double tol) {
    const Objective obj = to_objective(problem);
    return solve_reference(obj, Vec(static_cast<std::size_t>(obj.dim), 0.0), tol);
}

}  // namespace zo
