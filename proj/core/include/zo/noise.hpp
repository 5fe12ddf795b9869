#pragma once

#include <string>

#include "zo/rng.hpp"

namespace zo {

enum class NoiseVariant { none, uniform, gaussian_clipped, adversarial_sign };

// Additive observation noise with second moment at most delta^2.
//   none:             always 0
//   uniform:          U[-sqrt(3) delta, sqrt(3) delta], E[xi^2] = delta^2
//   gaussian_clipped: N(0, delta^2) clamped to +-3 delta; clamping only
//                     removes tail mass, so E[xi^2] ~ 0.995 delta^2 stays
//                     within budget without rescaling
//   adversarial_sign: delta * sign(hint), sign(0) := +1; a deterministic
//                     worst-case adversary at the second-moment boundary
struct NoiseModel {
    NoiseVariant variant = NoiseVariant::none;
    double delta = 0.0;
};

NoiseVariant noise_variant_from_string(const std::string& s);
const char* to_string(NoiseVariant v);

// One draw. `hint` is only consulted by adversarial_sign; estimators pass
// opposite hints for the two probes of a central difference so the pair
// difference is always 2*delta in magnitude.
double noise_sample(const NoiseModel& model, RngStream& rng, double hint);

}  // namespace zo
