#include "zo/planner.hpp"

#include <algorithm>
#include <cmath>

#include "zo/errors.hpp"

namespace zo {
namespace {

void check_common(double eps, int d, double beta) {
    if (eps >= 1.0) throw UsageError("accuracy eps must be < 1 (asymptotic formulas)");
    if (eps <= 0.0) throw UsageError("accuracy eps must be > 0");
    if (beta <= 2.0)
        throw UsageError("beta must exceed 2; the kernel machinery starts at beta = 3");
    if (d < 1) throw UsageError("dimension must be >= 1");
}

double expectation_kappa(const KernelConstants& c) {
    return c.convention == KappaConvention::expectation ? c.kappa : 0.5 * c.kappa;
}

}  // namespace

const char* to_string(PlanCase c) {
    switch (c) {
        case PlanCase::B_eq_1: return "B_eq_1";
        case PlanCase::B_lt_4dk: return "B_lt_4dk";
        case PlanCase::B_eq_4dk: return "B_eq_4dk";
        case PlanCase::B_gt_4dk: return "B_gt_4dk";
    }
    return "?";
}

double smoothing_choice(double eps, int d, double beta, PlanCase case_id) {
    check_common(eps, d, beta);
    const double inv_bm1 = 1.0 / (beta - 1.0);
    if (case_id == PlanCase::B_gt_4dk) return std::pow(eps, inv_bm1);
    const double h1 = std::pow(eps, 0.75);
    const double h2 = std::pow(eps, inv_bm1);
    const double h3 = std::pow(eps, 0.75 * inv_bm1) / std::pow(d, 0.5 * inv_bm1);
    return std::min({h1, h2, h3});
}

double max_noise(double eps, int d, double beta, int B, double kappa) {
    check_common(eps, d, beta);
    if (B < 1) throw UsageError("batch size must be >= 1");
    if (kappa <= 0.0) throw UsageError("kappa must be > 0");
    const double exp_high = (3.0 * beta + 1.0) / (4.0 * (beta - 1.0));
    if (B > 4.0 * d * kappa) return std::pow(eps, exp_high) * std::sqrt(double(B)) / d;
    // below the overbatching threshold the dependence on B drops out
    if (beta >= 7.0 / 3.0) return std::pow(eps, 1.5) / std::sqrt(double(d));
    return std::pow(eps, exp_high) / std::sqrt(double(d));
}

ComplexityPlan plan(int d, double beta, double L, double R, double eps, int B,
                    const KernelConstants& constants, std::optional<double> delta_target) {
    check_common(eps, d, beta);
    if (L <= 0.0 || R <= 0.0) throw UsageError("L and R must be > 0");
    if (B < 1) throw UsageError("batch size must be >= 1");

    const double kappa = expectation_kappa(constants);
    const double threshold = 4.0 * d * kappa;

    ComplexityPlan p;
    p.d = d;
    p.beta = beta;
    p.L = L;
    p.R = R;
    p.eps = eps;
    p.B = B;
    p.kappa = kappa;
    p.convention = KappaConvention::expectation;
    p.rho_B = std::max(1.0, threshold / B);

    const double rel = std::abs(B - threshold) / threshold;
    if (B > threshold && rel > 1e-9)
        p.case_id = PlanCase::B_gt_4dk;
    else if (B == 1)
        p.case_id = PlanCase::B_eq_1;
    else if (rel <= 1e-9)
        p.case_id = PlanCase::B_eq_4dk;
    else
        p.case_id = PlanCase::B_lt_4dk;

    switch (p.case_id) {
        case PlanCase::B_eq_1:
            p.N = std::sqrt(double(d) * d * L * R * R / eps);
            break;
        case PlanCase::B_lt_4dk:
            p.N = std::sqrt(double(d) * d * L * R * R / (eps * double(B) * B));
            break;
        case PlanCase::B_eq_4dk:
        case PlanCase::B_gt_4dk:
            p.N = std::sqrt(L * R * R / eps);
            break;
    }
    p.h = smoothing_choice(eps, d, beta, p.case_id);
    p.delta_max = max_noise(eps, d, beta, B, kappa);

    if (p.case_id == PlanCase::B_gt_4dk) {
        // the noise term takes over once delta saturates its budget
        const double noise_calls =
            double(d) * d * p.delta_max * p.delta_max /
            std::pow(eps, 2.0 + 2.0 / (beta - 1.0));
        p.T = std::max(p.N * B, noise_calls);
    } else {
        p.T = p.N * B;
    }

    if (delta_target) {
        if (*delta_target < 0.0) throw UsageError("delta target must be >= 0");
        p.required_B = double(d) * d * (*delta_target) * (*delta_target) /
                       std::pow(eps, 1.5 + 2.0 / (beta - 1.0));
    }
    return p;
}

}  // namespace zo
