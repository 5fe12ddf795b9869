#pragma once

#include <optional>
#include <string>

#include "zo/kernel.hpp"

namespace zo {

// Batching regimes, split on how B compares with 4 d kappa.
enum class PlanCase { B_eq_1, B_lt_4dk, B_eq_4dk, B_gt_4dk };

const char* to_string(PlanCase c);

// Closed-form iteration/oracle complexity for a target accuracy. All
// expressions are evaluated with constant 1 and are scale-free: experiments
// calibrate one multiplicative constant per problem family.
struct ComplexityPlan {
    PlanCase case_id = PlanCase::B_eq_1;
    double N = 0.0;          // iterations
    double T = 0.0;          // oracle calls
    double h = 0.0;          // smoothing parameter
    double delta_max = 0.0;  // largest noise level that keeps the rate
    double rho_B = 1.0;
    // echo of the inputs for auditability
    int d = 0;
    double beta = 0.0;
    double L = 0.0;
    double R = 0.0;
    double eps = 0.0;
    int B = 1;
    double kappa = 0.0;
    KappaConvention convention = KappaConvention::expectation;
    // batch size needed to tolerate a requested noise level (set when a
    // delta target is supplied): B >= d^2 delta^2 / eps^(3/2 + 2/(beta-1))
    std::optional<double> required_B;
};

// Smoothing parameter for the given regime. Regimes with B <= 4 d kappa use
// min{eps^(3/4), eps^(1/(beta-1)), eps^(3/(4(beta-1))) / d^(1/(2(beta-1)))};
// the overbatched regime uses eps^(1/(beta-1)).
double smoothing_choice(double eps, int d, double beta, PlanCase case_id);

// Largest noise level that does not degrade the rate. For B <= 4 d kappa:
// eps^(3/2)/sqrt(d) when beta >= 7/3, else eps^((3beta+1)/(4(beta-1)))/sqrt(d).
// For B > 4 d kappa: eps^((3beta+1)/(4(beta-1))) * sqrt(B) / d.
double max_noise(double eps, int d, double beta, int B, double kappa);

ComplexityPlan plan(int d, double beta, double L, double R, double eps, int B,
                    const KernelConstants& constants,
                    std::optional<double> delta_target = std::nullopt);

}  // namespace zo
