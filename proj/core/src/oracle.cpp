#include "zo/oracle.hpp"

#include <cmath>
#include <cstddef>

#include "zo/errors.hpp"

namespace zo {

double ZeroOrderOracle::query(const Vec& x, RngStream& rng, double hint) {
    if (static_cast<int>(x.size()) != objective_.dim)
        throw UsageError("oracle query dimension " + std::to_string(x.size()) +
                         " does not match objective dimension " +
                         std::to_string(objective_.dim));
    if (!all_finite(x)) throw UsageError("oracle query point has non-finite entries");
    const double f = objective_.value(x);
    if (!std::isfinite(f)) throw EvaluationError("objective returned a non-finite value");
    query_count_.fetch_add(1, std::memory_order_relaxed);
    return f + noise_sample(noise_, rng, hint);
}

double oracle_query(ZeroOrderOracle& oracle, const Vec& x, RngStream& rng, double hint) {
    return oracle.query(x, rng, hint);
}

}  // namespace zo
