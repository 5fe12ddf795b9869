#pragma once

#include <cstdint>
#include <optional>

#include "zo/kernel.hpp"
#include "zo/oracle.hpp"
#include "zo/rng.hpp"
#include "zo/vec.hpp"

namespace zo {

enum class EstimatorMode { kernel_onepoint, central_l2 };

struct EstimatorConfig {
    double h = 0.1;                    // smoothing radius, > 0
    int B = 1;                         // batch size, >= 1
    std::optional<KernelSpec> kernel;  // required for kernel_onepoint
    EstimatorMode mode = EstimatorMode::kernel_onepoint;
};

struct GradientEstimate {
    Vec vector;
    int samples_used = 0;
    std::int64_t oracle_calls = 0;  // always 2 * samples_used
    double h_used = 0.0;
};

// Uniform direction on the unit sphere (normalized gaussian vector).
Vec sample_sphere(int d, RngStream& rng);

// One draw of the kernel-smoothed one-point-feedback estimator:
//   g = d * (f~(x + h r e) - f~(x - h r e)) / (2h) * K(r) * e
// with e uniform on the sphere, r uniform on [-1,1]. Two oracle calls with
// independent noise. The kernel's moment conditions push the bias down to
// O(h^(beta-1)) instead of the O(h^2) of a plain central difference.
Vec kernel_gradient_sample(ZeroOrderOracle& oracle, const KernelSpec& kernel,
                           const Vec& x, double h, RngStream& rng);

// Plain central-difference baseline along a random sphere direction:
//   g = d * (f~(x + h e) - f~(x - h e)) / (2h) * e
Vec central_l2_sample(ZeroOrderOracle& oracle, const Vec& x, double h, RngStream& rng);

// Mean of B independent samples. Sample i always uses rng.split(i), and
// samples are combined by a fixed pairwise tree, so the result is bitwise
// identical no matter how many workers execute the batch (ZO_THREADS).
GradientEstimate batched_estimate(ZeroOrderOracle& oracle, const EstimatorConfig& cfg,
                                  const Vec& x, const RngStream& rng);

// Monte-Carlo diagnostics. Both draw n_mc single samples (batching divides
// variance but cannot move the bias, and the second-moment bound below is a
// per-sample statement). n_mc < 1000 is rejected as meaningless.
struct BiasReport {
    double bias_norm = 0.0;      // || mean(g) - reference ||
    double mc_stderr = 0.0;      // l2 error estimate of the MC mean
    double bound = 0.0;          // c * kappa_beta * L_beta * h^(beta-1), NaN if unknown
    double calibration_c = 1.0;
    int n_mc = 0;
};

struct SecondMomentReport {
    double value = 0.0;      // mean of ||g||^2
    double mc_stderr = 0.0;  // stderr of that mean
    // 4 d kappa ||grad f||^2 + 4 d kappa L^2 h^2 + kappa d^2 Delta^2 / h^2,
    // kappa in the expectation convention; NaN when grad or L is unknown
    double bound = 0.0;
    int n_mc = 0;
};

BiasReport estimate_bias(ZeroOrderOracle& oracle, const EstimatorConfig& cfg, const Vec& x,
                         int n_mc, const Vec& reference_grad, const RngStream& rng,
                         double calibration_c = 1.0);

SecondMomentReport estimate_second_moment(ZeroOrderOracle& oracle, const EstimatorConfig& cfg,
                                          const Vec& x, int n_mc, const RngStream& rng);

// Resolved worker count: ZO_THREADS, where 0 or unset means auto.
int resolve_worker_count();

}  // namespace zo
