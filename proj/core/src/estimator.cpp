#include "zo/estimator.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "zo/errors.hpp"

namespace zo {
namespace {

void check_cfg(const EstimatorConfig& cfg) {
    if (cfg.h <= 0.0) throw UsageError("smoothing parameter h must be > 0");
    if (cfg.B < 1) throw UsageError("batch size B must be >= 1");
    if (cfg.mode == EstimatorMode::kernel_onepoint && !cfg.kernel)
        throw UsageError("kernel_onepoint mode needs a kernel");
}

Vec one_sample(ZeroOrderOracle& oracle, const EstimatorConfig& cfg, const Vec& x,
               RngStream& rng) {
    if (cfg.mode == EstimatorMode::kernel_onepoint)
        return kernel_gradient_sample(oracle, *cfg.kernel, x, cfg.h, rng);
    return central_l2_sample(oracle, x, cfg.h, rng);
}

// sum of samples[lo, hi); fixed halving tree independent of thread layout
Vec tree_sum(const std::vector<Vec>& samples, int lo, int hi) {
    if (hi - lo == 1) return samples[lo];
    const int mid = lo + (hi - lo) / 2;
    Vec left = tree_sum(samples, lo, mid);
    const Vec right = tree_sum(samples, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

}  // namespace

int resolve_worker_count() {
    const char* env = std::getenv("ZO_THREADS");
    long v = 0;
    if (env && *env) v = std::strtol(env, nullptr, 10);
    if (v <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }
    return static_cast<int>(v);
}

Vec sample_sphere(int d, RngStream& rng) {
    if (d < 1) throw UsageError("sphere dimension must be >= 1");
    Vec e(d);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            e[i] = rng.next_gaussian();
            n2 += e[i] * e[i];
        }
    } while (n2 == 0.0);
    if (d == 1) {  // exact signs, not 1/sqrt(g^2) rounding
        e[0] = std::copysign(1.0, e[0]);
        return e;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& v : e) v *= inv;
    return e;
}

Vec kernel_gradient_sample(ZeroOrderOracle& oracle, const KernelSpec& kernel, const Vec& x,
                           double h, RngStream& rng) {
    if (h <= 0.0) throw UsageError("smoothing parameter h must be > 0");
    const int d = oracle.objective().dim;
    Vec e = sample_sphere(d, rng);
    const double r = rng.next_uniform(-1.0, 1.0);
    Vec probe = x;
    axpy(h * r, e, probe);
    const double f_plus = oracle.query(probe, rng, +1.0);
    probe = x;
    axpy(-h * r, e, probe);
    const double f_minus = oracle.query(probe, rng, -1.0);
    const double c = d * (f_plus - f_minus) / (2.0 * h) * kernel_eval(kernel, r);
    scale(e, c);
    return e;
}

Vec central_l2_sample(ZeroOrderOracle& oracle, const Vec& x, double h, RngStream& rng) {
    if (h <= 0.0) throw UsageError("smoothing parameter h must be > 0");
    const int d = oracle.objective().dim;
    Vec e = sample_sphere(d, rng);
    Vec probe = x;
    axpy(h, e, probe);
    const double f_plus = oracle.query(probe, rng, +1.0);
    probe = x;
    axpy(-h, e, probe);
    const double f_minus = oracle.query(probe, rng, -1.0);
    scale(e, d * (f_plus - f_minus) / (2.0 * h));
    return e;
}

GradientEstimate batched_estimate(ZeroOrderOracle& oracle, const EstimatorConfig& cfg,
                                  const Vec& x, const RngStream& rng) {
    check_cfg(cfg);
    const int B = cfg.B;
    const int d = oracle.objective().dim;
    std::vector<Vec> samples(B);

    auto fill = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            RngStream stream = rng.split(static_cast<std::uint64_t>(i));
            samples[i] = one_sample(oracle, cfg, x, stream);
        }
    };

    // threads only pay off for wide batches; results are identical either way
    const int workers = resolve_worker_count();
    if (workers > 1 && static_cast<long>(B) * d >= 32768) {
        const int used = std::min(workers, B);
        std::vector<std::thread> pool;
        pool.reserve(used);
        const int chunk = (B + used - 1) / used;
        for (int t = 0; t < used; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(B, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(fill, lo, hi);
        }
        for (auto& th : pool) th.join();
    } else {
        fill(0, B);
    }

    GradientEstimate est;
    est.vector = tree_sum(samples, 0, B);
    scale(est.vector, 1.0 / B);
    est.samples_used = B;
    est.oracle_calls = 2LL * B;
    est.h_used = cfg.h;
    if (!all_finite(est.vector))
        throw EvaluationError("gradient estimate has non-finite entries");
    return est;
}

BiasReport estimate_bias(ZeroOrderOracle& oracle, const EstimatorConfig& cfg, const Vec& x,
                         int n_mc, const Vec& reference_grad, const RngStream& rng,
                         double calibration_c) {
    check_cfg(cfg);
    if (n_mc < 1000) throw UsageError("bias estimate needs n_mc >= 1000");
    const int d = oracle.objective().dim;
    Vec mean(d, 0.0);
    double sq_sum = 0.0;  // sum of ||g||^2 for the trace variance
    for (int i = 0; i < n_mc; ++i) {
        RngStream stream = rng.split(static_cast<std::uint64_t>(i));
        const Vec g = one_sample(oracle, cfg, x, stream);
        axpy(1.0, g, mean);
        sq_sum += dot(g, g);
    }
    scale(mean, 1.0 / n_mc);

    BiasReport report;
    report.n_mc = n_mc;
    report.calibration_c = calibration_c;
    Vec diff = mean;
    axpy(-1.0, reference_grad, diff);
    report.bias_norm = norm2(diff);
    const double trace_var = std::max(0.0, sq_sum / n_mc - dot(mean, mean));
    report.mc_stderr = std::sqrt(trace_var / n_mc);

    const Objective& obj = oracle.objective();
    if (obj.beta > 2.0 && obj.L_beta > 0.0 && cfg.kernel) {
        const KernelConstants kc =
            compute_constants(*cfg.kernel, obj.beta, 64, KappaConvention::plain_integral);
        report.bound =
            calibration_c * kc.kappa_beta * obj.L_beta * std::pow(cfg.h, obj.beta - 1.0);
    } else {
        report.bound = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

SecondMomentReport estimate_second_moment(ZeroOrderOracle& oracle, const EstimatorConfig& cfg,
                                          const Vec& x, int n_mc, const RngStream& rng) {
    check_cfg(cfg);
    if (n_mc < 1000) throw UsageError("second-moment estimate needs n_mc >= 1000");
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        RngStream stream = rng.split(static_cast<std::uint64_t>(i));
        const Vec g = one_sample(oracle, cfg, x, stream);
        const double m = dot(g, g);
        sum += m;
        sum_sq += m * m;
    }
    SecondMomentReport report;
    report.n_mc = n_mc;
    report.value = sum / n_mc;
    const double var = std::max(0.0, sum_sq / n_mc - report.value * report.value);
    report.mc_stderr = std::sqrt(var / n_mc);

    const Objective& obj = oracle.objective();
    if (obj.has_grad() && obj.L > 0.0 && cfg.kernel) {
        const KernelConstants kc =
            compute_constants(*cfg.kernel, obj.beta > 0 ? obj.beta : 3.0, 64,
                              KappaConvention::expectation);
        const double d = obj.dim;
        const double g2 = dot(obj.grad(x), obj.grad(x));
        const double delta = oracle.noise().delta;
        report.bound = 4.0 * d * kc.kappa * g2 + 4.0 * d * kc.kappa * obj.L * obj.L * cfg.h * cfg.h +
                       kc.kappa * d * d * delta * delta / (cfg.h * cfg.h);
    } else {
        report.bound = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

}  // namespace zo
