#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zo/estimator.hpp"
#include "zo/oracle.hpp"
#include "zo/rng.hpp"
#include "zo/vec.hpp"

namespace zo {

// Where the optimizer gets its gradient direction. exact and
// exact_plus_bias are for schedule validation; zero_order is the real thing.
struct GradientProvider {
    // returns (estimate, oracle calls consumed)
    std::function<std::pair<Vec, std::int64_t>(const Vec&, const RngStream&)> estimate;

    static GradientProvider exact(const Objective& obj);
    static GradientProvider exact_plus_bias(const Objective& obj, Vec bias);
    static GradientProvider zero_order(ZeroOrderOracle& oracle, EstimatorConfig cfg);
};

// effective strong-growth constant after batching: max{1, 4 d kappa / B},
// kappa in the expectation convention
double rho_b(int d, double kappa, int B);

// Momentum schedule. From gamma_0 = a_0 = alpha_0 = 0:
//   gamma_k   = (1/rho + sqrt(1/rho^2 + 4 gamma_{k-1}^2)) / 2
//   a_{k+1}   = gamma_k sqrt(eta rho)        (pre-advance gamma)
//   alpha_k   = gamma_k eta / (gamma_k eta + a_k^2)
// The gamma recurrence satisfies gamma_k^2 - gamma_k/rho = gamma_{k-1}^2
// exactly, which collapses alpha_k to 1/(rho gamma_k).
struct AccSgdParams {
    double eta = 0.0;    // step size; <= 0 means derive the default 1/(rho_B L)
    double rho_B = 1.0;  // >= 1
    double L = 1.0;      // smoothness constant
    bool conservative_eta = false;  // use 1/(2 rho_B L) instead of 1/(rho_B L)

    // schedule state
    double gamma = 0.0;
    double a = 0.0;
    double alpha = 0.0;
    std::int64_t k = 0;

    double resolved_eta() const;
};

AccSgdParams schedule_advance(AccSgdParams params);

struct AccSgdState {
    Vec x, y, z;
    std::int64_t k = 0;

    explicit AccSgdState(const Vec& x0) : x(x0), y(x0), z(x0) {}
};

struct TraceRecord {
    std::int64_t iteration = 0;
    std::int64_t oracle_calls = 0;
    double f_value = 0.0;  // f(x_k), or the gap f(x_k) - f_star when known
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    // optional post-hoc diagnostics, populated when track_radii is on
    double z_to_y = 0.0;
    double z_to_opt = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    bool diverged = false;
    bool h_cancellation_warning = false;
    std::string note;
    std::int64_t iterations_run = 0;
    std::int64_t total_oracle_calls = 0;
};

struct StopRule {
    std::int64_t max_iterations = 0;
    double target_gap = -1.0;           // < 0 disables
    double guard_factor = 1e6;          // abort when ||x|| > guard * (1 + ||x0||)
    std::int64_t record_stride = 1;
    bool track_radii = false;
    std::optional<Vec> x_star;          // for the z_to_opt diagnostic
    double f_star = 0.0;                // subtracted from recorded f when known
    bool f_star_known = false;
};

// One iteration: g = provider(y_k); x_{k+1} = y_k - eta g;
// z_{k+1} = z_k - gamma_{k+1} eta g; y_{k+1} = alpha_{k+1} z_{k+1}
// + (1 - alpha_{k+1}) x_{k+1}. The schedule advances exactly once.
std::int64_t acc_sgd_step(AccSgdState& state, AccSgdParams& params,
                          const GradientProvider& provider, const RngStream& rng);

// Full accelerated run with the zero-order batched estimator. Oracle calls
// total 2 B N. The per-iteration stream is run_rng.split(k).
RunTrace run_zo_acc_sgd(ZeroOrderOracle& oracle, const EstimatorConfig& est_cfg,
                        AccSgdParams params, const Vec& x0, const StopRule& stop,
                        std::uint64_t seed);

// Unaccelerated baseline: x_{k+1} = x_k - eta g with the same estimator.
RunTrace run_zo_sgd(ZeroOrderOracle& oracle, const EstimatorConfig& est_cfg,
                    double step_size, const Vec& x0, const StopRule& stop,
                    std::uint64_t seed);

// Shared driver, also used with exact providers for schedule validation.
RunTrace run_accelerated(const GradientProvider& provider,
                         const std::function<double(const Vec&)>& f_value,
                         AccSgdParams params, const Vec& x0, const StopRule& stop,
                         std::uint64_t seed);

}  // namespace zo
