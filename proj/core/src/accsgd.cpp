#include "zo/accsgd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "zo/errors.hpp"

namespace zo {

GradientProvider GradientProvider::exact(const Objective& obj) {
    if (!obj.has_grad()) throw UsageError("exact provider needs a gradient");
    GradientProvider p;
    p.estimate = [obj](const Vec& x, const RngStream&) {
        return std::make_pair(obj.grad(x), std::int64_t{0});
    };
    return p;
}

GradientProvider GradientProvider::exact_plus_bias(const Objective& obj, Vec bias) {
    if (!obj.has_grad()) throw UsageError("exact provider needs a gradient");
    GradientProvider p;
    p.estimate = [obj, bias = std::move(bias)](const Vec& x, const RngStream&) {
        Vec g = obj.grad(x);
        axpy(1.0, bias, g);
        return std::make_pair(std::move(g), std::int64_t{0});
    };
    return p;
}

GradientProvider GradientProvider::zero_order(ZeroOrderOracle& oracle, EstimatorConfig cfg) {
    GradientProvider p;
    p.estimate = [&oracle, cfg](const Vec& x, const RngStream& rng) {
        GradientEstimate est = batched_estimate(oracle, cfg, x, rng);
        return std::make_pair(std::move(est.vector), est.oracle_calls);
    };
    return p;
}

double rho_b(int d, double kappa, int B) {
    if (d < 1 || B < 1) throw UsageError("rho_B needs d >= 1 and B >= 1");
    if (kappa <= 0.0) throw UsageError("rho_B needs kappa > 0");
    return std::max(1.0, 4.0 * d * kappa / B);
}

double AccSgdParams::resolved_eta() const {
    if (eta > 0.0) return eta;
    const double base = 1.0 / (rho_B * L);
    return conservative_eta ? 0.5 * base : base;
}

AccSgdParams schedule_advance(AccSgdParams p) {
    if (p.rho_B < 1.0) throw UsageError("rho_B must be >= 1");
    const double inv_rho = 1.0 / p.rho_B;
    const double eta = p.resolved_eta();
    const double gamma_prev = p.gamma;
    p.gamma = 0.5 * (inv_rho + std::sqrt(inv_rho * inv_rho + 4.0 * gamma_prev * gamma_prev));
    p.a = gamma_prev * std::sqrt(eta * p.rho_B);
    p.alpha = p.gamma * eta / (p.gamma * eta + p.a * p.a);
    p.k += 1;
    return p;
}

std::int64_t acc_sgd_step(AccSgdState& state, AccSgdParams& params,
                          const GradientProvider& provider, const RngStream& rng) {
    auto [g, calls] = provider.estimate(state.y, rng);
    params = schedule_advance(params);
    const double eta = params.resolved_eta();

    // x_{k+1} = y_k - eta g; z_{k+1} = z_k - gamma eta g
    Vec x_next = state.y;
    axpy(-eta, g, x_next);
    axpy(-params.gamma * eta, g, state.z);
    // y_{k+1} = x_{k+1} + alpha (z_{k+1} - x_{k+1}); exact when z == x
    state.y = state.z;
    axpy(-1.0, x_next, state.y);
    scale(state.y, params.alpha);
    axpy(1.0, x_next, state.y);
    state.x = std::move(x_next);
    state.k += 1;

    if (!all_finite(state.x) || !all_finite(state.z))
        throw DivergenceError("iterate left the finite range at step " +
                              std::to_string(state.k));
    return calls;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void record(RunTrace& trace, const StopRule& stop, std::int64_t k, std::int64_t calls,
            double f, double wall_ms, std::uint64_t seed, const Vec* z, const Vec* y) {
    TraceRecord r;
    r.iteration = k;
    r.oracle_calls = calls;
    r.f_value = stop.f_star_known ? f - stop.f_star : f;
    r.wall_ms = wall_ms;
    r.seed = seed;
    if (stop.track_radii && z && y) {
        Vec d = *z;
        axpy(-1.0, *y, d);
        r.z_to_y = norm2(d);
        if (stop.x_star) {
            d = *z;
            axpy(-1.0, *stop.x_star, d);
            r.z_to_opt = norm2(d);
        }
    }
    trace.records.push_back(std::move(r));
}

}  // namespace

RunTrace run_accelerated(const GradientProvider& provider,
                         const std::function<double(const Vec&)>& f_value,
                         AccSgdParams params, const Vec& x0, const StopRule& stop,
                         std::uint64_t seed) {
    const auto t0 = Clock::now();
    RunTrace trace;
    AccSgdState state(x0);
    RngStream run_rng(seed);
    const double guard = stop.guard_factor * (1.0 + norm2(x0));
    std::int64_t calls = 0;

    const std::int64_t stride = std::max<std::int64_t>(1, stop.record_stride);
    double f = f_value(state.x);
    record(trace, stop, 0, 0, f, ms_since(t0), seed, &state.z, &state.y);

    for (std::int64_t k = 0; k < stop.max_iterations; ++k) {
        try {
            calls += acc_sgd_step(state, params, provider, run_rng.split(k));
        } catch (const DivergenceError&) {
            trace.diverged = true;
            trace.note = "non-finite iterate";
            break;
        } catch (const EvaluationError&) {
            trace.diverged = true;
            trace.note = "non-finite iterate";
            break;
        }
        trace.iterations_run = k + 1;
        f = f_value(state.x);
        const bool guard_hit = norm2(state.x) > guard;
        const bool target_hit =
            stop.target_gap >= 0.0 && stop.f_star_known && f - stop.f_star <= stop.target_gap;
        const bool last = (k + 1 == stop.max_iterations) || guard_hit || target_hit;
        if ((k + 1) % stride == 0 || last)
            record(trace, stop, k + 1, calls, f, ms_since(t0), seed, &state.z, &state.y);
        if (guard_hit) {
            trace.diverged = true;
            trace.note = "divergence guard tripped";
            break;
        }
        if (target_hit) break;
    }
    trace.total_oracle_calls = calls;
    return trace;
}

RunTrace run_zo_acc_sgd(ZeroOrderOracle& oracle, const EstimatorConfig& est_cfg,
                        AccSgdParams params, const Vec& x0, const StopRule& stop,
                        std::uint64_t seed) {
    if (est_cfg.mode == EstimatorMode::kernel_onepoint) {
        if (!est_cfg.kernel) throw UsageError("kernel_onepoint mode needs a kernel");
        const MomentReport report = validate_moments(*est_cfg.kernel, 64);
        if (!report.all_pass)
            throw UsageError("kernel fails moment condition " + report.first_failure);
    }
    const GradientProvider provider = GradientProvider::zero_order(oracle, est_cfg);
    auto f = [&](const Vec& x) { return oracle.objective().value(x); };
    RunTrace trace = run_accelerated(provider, f, params, x0, stop, seed);
    // cancellation warning: h far below the float resolution of typical f
    const double f0 = oracle.objective().value(x0);
    if (est_cfg.h < 1e-3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0)))
        trace.h_cancellation_warning = true;
    return trace;
}

RunTrace run_zo_sgd(ZeroOrderOracle& oracle, const EstimatorConfig& est_cfg, double step_size,
                    const Vec& x0, const StopRule& stop, std::uint64_t seed) {
    if (step_size <= 0.0) throw UsageError("step size must be > 0");
    const auto t0 = Clock::now();
    RunTrace trace;
    Vec x = x0;
    RngStream run_rng(seed);
    const double guard = stop.guard_factor * (1.0 + norm2(x0));
    std::int64_t calls = 0;
    auto fv = [&](const Vec& p) { return oracle.objective().value(p); };

    const std::int64_t stride = std::max<std::int64_t>(1, stop.record_stride);
    record(trace, stop, 0, 0, fv(x), ms_since(t0), seed, nullptr, nullptr);
    for (std::int64_t k = 0; k < stop.max_iterations; ++k) {
        GradientEstimate est;
        try {
            est = batched_estimate(oracle, est_cfg, x, run_rng.split(k));
        } catch (const EvaluationError&) {
            trace.diverged = true;
            trace.note = "non-finite iterate";
            break;
        }
        calls += est.oracle_calls;
        axpy(-step_size, est.vector, x);
        if (!all_finite(x)) {
            trace.diverged = true;
            trace.note = "non-finite iterate";
            break;
        }
        trace.iterations_run = k + 1;
        const double f = fv(x);
        const bool guard_hit = norm2(x) > guard;
        const bool target_hit =
            stop.target_gap >= 0.0 && stop.f_star_known && f - stop.f_star <= stop.target_gap;
        const bool last = (k + 1 == stop.max_iterations) || guard_hit || target_hit;
        if ((k + 1) % stride == 0 || last)
            record(trace, stop, k + 1, calls, f, ms_since(t0), seed, nullptr, nullptr);
        if (guard_hit) {
            trace.diverged = true;
            trace.note = "divergence guard tripped";
            break;
        }
        if (target_hit) break;
    }
    trace.total_oracle_calls = calls;
    return trace;
}

}  // namespace zo
