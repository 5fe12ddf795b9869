#pragma once

#include <atomic>
#include <cstdint>
#include <functional>

#include "zo/noise.hpp"
#include "zo/rng.hpp"
#include "zo/vec.hpp"

namespace zo {

// An objective with whatever side information the problem can supply.
// value must be deterministic in x. grad is for validation and reference
// solves only; no zero-order code path consumes it.
struct Objective {
    int dim = 0;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;  // empty when unavailable
    double L = 0.0;                       // gradient Lipschitz constant, 0 = unknown
    double beta = 0.0;                    // higher-order smoothness order, 0 = unknown
    double L_beta = 0.0;

    bool has_grad() const { return static_cast<bool>(grad); }
};

// Value-only access to an objective through additive noise. Every query
// draws fresh noise: the same point queried twice gives two different
// observations (one-point feedback).
class ZeroOrderOracle {
public:
    ZeroOrderOracle(Objective objective, NoiseModel noise)
        : objective_(std::move(objective)), noise_(noise) {}

    // f(x) + xi. Throws UsageError on dimension mismatch, EvaluationError
    // when f(x) is non-finite. hint feeds the adversarial noise variant.
    double query(const Vec& x, RngStream& rng, double hint = 1.0);

    const Objective& objective() const { return objective_; }
    const NoiseModel& noise() const { return noise_; }
    std::uint64_t query_count() const { return query_count_.load(std::memory_order_relaxed); }
    void reset_query_count() { query_count_.store(0, std::memory_order_relaxed); }

private:
    Objective objective_;
    NoiseModel noise_;
    std::atomic<std::uint64_t> query_count_{0};  // accounting only, never feeds noise
};

double oracle_query(ZeroOrderOracle& oracle, const Vec& x, RngStream& rng,
                    double hint = 1.0);

}  // namespace zo
