#include "zo/noise.hpp"

#include <algorithm>
#include <cmath>

#include "zo/errors.hpp"

namespace zo {

NoiseVariant noise_variant_from_string(const std::string& s) {
    if (s == "none") return NoiseVariant::none;
    if (s == "uniform") return NoiseVariant::uniform;
    if (s == "gaussian_clipped") return NoiseVariant::gaussian_clipped;
    if (s == "adversarial_sign") return NoiseVariant::adversarial_sign;
    throw UsageError("unknown noise variant: " + s);
}

const char* to_string(NoiseVariant v) {
    switch (v) {
        case NoiseVariant::none: return "none";
        case NoiseVariant::uniform: return "uniform";
        case NoiseVariant::gaussian_clipped: return "gaussian_clipped";
        case NoiseVariant::adversarial_sign: return "adversarial_sign";
    }
    return "?";
}

double noise_sample(const NoiseModel& model, RngStream& rng, double hint) {
    if (model.delta < 0.0) throw UsageError("noise level must be >= 0");
    const double d = model.delta;
    switch (model.variant) {
        case NoiseVariant::none:
            return 0.0;
        case NoiseVariant::uniform: {
            // U[-a, a] has second moment a^2/3; a = sqrt(3) delta hits delta^2
            const double a = std::sqrt(3.0) * d;
            return rng.next_uniform(-a, a);
        }
        case NoiseVariant::gaussian_clipped:
            return std::clamp(d * rng.next_gaussian(), -3.0 * d, 3.0 * d);
        case NoiseVariant::adversarial_sign:
            return hint < 0.0 ? -d : d;
    }
    return 0.0;
}

}  // namespace zo
