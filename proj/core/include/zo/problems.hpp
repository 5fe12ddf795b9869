#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zo/oracle.hpp"
#include "zo/vec.hpp"

namespace zo {

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    Vec apply(const Vec& x) const;             // A x
    Vec apply_transpose(const Vec& v) const;   // A^T v
};

// Compressed sparse rows; column indices strictly increasing within a row.
struct SparseMatrix {
    std::vector<std::int64_t> row_offsets;  // size rows+1
    std::vector<int> col_indices;
    std::vector<double> values;
    int rows = 0;
    int cols = 0;

    Vec apply(const Vec& x) const;
    Vec apply_transpose(const Vec& v) const;
};

// f(x) = ||A x - b||^2, gradient 2 A^T (A x - b), L = 2 lambda_max(A^T A).
struct LeastSquaresProblem {
    DenseMatrix A;
    Vec b;
    Vec x_star;          // planted solution when known (empty otherwise)
    bool planted = false;
};

// f(x) = (1/M) sum log(1 + exp(-y_i (A x)_i)), labels y in {-1,+1}.
// L = (1/(4M)) sqrt(lambda_max(A^T A)); a valid upper bound on the gradient
// Lipschitz constant whenever lambda_max(A^T A) <= 1.
struct LogisticRegressionProblem {
    SparseMatrix A;
    Vec y;
};

struct DatasetMeta {
    std::string name;
    int M = 0;
    int d = 0;
    std::string source_path;
};

struct LibsvmData {
    SparseMatrix matrix;
    Vec labels;  // mapped to -1/+1, smaller raw label -> -1
    DatasetMeta meta;
};

// Random instance with singular values log-uniform in [1, condition_target];
// the endpoints are pinned so the realized spectrum hits both 1 and the
// target. b = A x_star for a planted gaussian x_star, so f* = 0.
LeastSquaresProblem least_squares_make(int d, int p, std::uint64_t seed,
                                       double condition_target);

// Gradient Lipschitz constants via power iteration on A^T A (relative
// tolerance 1e-6, at most 1e4 iterations; non-convergence throws
// EvaluationError with the residual).
double smoothness_constant(const LeastSquaresProblem& problem);
double smoothness_constant(const LogisticRegressionProblem& problem);

// Largest eigenvalue of A^T A given the matvec pair.
double power_iteration_sq(const std::function<Vec(const Vec&)>& apply,
                          const std::function<Vec(const Vec&)>& apply_t, int dim);

Objective to_objective(const LeastSquaresProblem& problem);
Objective to_objective(const LogisticRegressionProblem& problem);

// LIBSVM text: `<label> <idx>:<val> ...`, indices 1-based and strictly
// increasing within a line, exactly two distinct label values in the file.
// Malformed input throws ParseError carrying the 1-based line number.
LibsvmData parse_libsvm(std::istream& in, const std::string& name = "",
                        const std::string& source_path = "");
LibsvmData parse_libsvm_file(const std::string& path);
void serialize_libsvm(const SparseMatrix& matrix, const Vec& labels, std::ostream& out);

struct ReferenceSolution {
    Vec x;
    double f = 0.0;
    double grad_norm = 0.0;
    std::int64_t iterations = 0;
    bool hit_cap = false;  // stopped by the iteration cap, not the tolerance
};

// Exact-gradient accelerated descent with function-value adaptive restart,
// run until ||grad f|| <= tol (default 1e-10) or 1e6 iterations.
ReferenceSolution solve_reference(const Objective& objective, const Vec& x0,
                                  double tol = 1e-10);
ReferenceSolution solve_reference(const LeastSquaresProblem& problem, double tol = 1e-10);
ReferenceSolution solve_reference(const LogisticRegressionProblem& problem,
                                  double tol = 1e-10);

}  // namespace zo
