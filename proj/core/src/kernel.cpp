#include "zo/kernel.hpp"

#include <cmath>
#include <cstddef>

#include "zo/errors.hpp"
#include "zo/quadrature.hpp"

namespace zo {

const char* to_string(KappaConvention c) {
    return c == KappaConvention::expectation ? "expectation" : "plain_integral";
}

KernelSpec legendre_kernel(int beta) {
    // Coefficients come from expanding K = sum_m c_m p_m over the odd
    // Legendre polynomials with c_m = (2m+1)/2 * integral(u p_m): the unique
    // lowest-degree odd polynomial with E[K]=0, E[rK]=1, E[r^j K]=0, j<=l.
    KernelSpec spec;
    if (beta == 3 || beta == 4) {
        // (15 r / 4)(5 - 7 r^2)
        spec.beta_targets = {3, 4};
        spec.coefficients = {0.0, 75.0 / 4.0, 0.0, -105.0 / 4.0};
        spec.l = 3;
    } else if (beta == 5 || beta == 6) {
        // (105 r / 64)(99 r^4 - 126 r^2 + 35)
        spec.beta_targets = {5, 6};
        spec.coefficients = {0.0,  105.0 * 35.0 / 64.0, 0.0, -105.0 * 126.0 / 64.0,
                             0.0, 105.0 * 99.0 / 64.0};
        spec.l = 5;
    } else {
        throw UsageError("unsupported smoothness order " + std::to_string(beta) +
                         "; shipped kernels cover beta in {3,4,5,6}");
    }
    return spec;
}

double kernel_eval(const KernelSpec& spec, double r) {
    if (std::abs(r) > 1.0) throw UsageError("kernel argument outside [-1,1]");
    // Horner
    double v = 0.0;
    for (std::size_t i = spec.coefficients.size(); i-- > 0;)
        v = v * r + spec.coefficients[i];
    return v;
}

MomentReport validate_moments(const KernelSpec& spec, int quad_points) {
    if (quad_points < spec.degree() + 2)
        throw UsageError("need at least degree+2 quadrature points for exactness");
    MomentReport report;
    report.all_pass = true;
    for (int j = 0; j <= spec.l; ++j) {
        MomentCheck check;
        check.j = j;
        check.target = (j == 1) ? 1.0 : 0.0;
        check.value = 0.5 * integrate(
                                [&](double r) { return std::pow(r, j) * kernel_eval(spec, r); },
                                -1.0, 1.0, quad_points);
        check.pass = std::abs(check.value - check.target) < report.tolerance;
        if (!check.pass && report.all_pass) {
            report.all_pass = false;
            report.first_failure = "j=" + std::to_string(j);
        } else if (!check.pass) {
            report.all_pass = false;
        }
        report.moments.push_back(check);
    }
    return report;
}

std::vector<double> kernel_positive_roots(const KernelSpec& spec) {
    std::vector<double> roots;
    const int n = 4096;
    double prev_r = 1e-9;  // skip the root pinned at 0
    double prev_v = kernel_eval(spec, prev_r);
    for (int i = 1; i <= n; ++i) {
        const double r = static_cast<double>(i) / n;
        const double v = kernel_eval(spec, r);
        if (prev_v == 0.0) {
            roots.push_back(prev_r);
        } else if (v != 0.0 && std::signbit(v) != std::signbit(prev_v)) {
            double lo = prev_r, hi = r;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (hi - lo < 1e-15) break;
                if (std::signbit(kernel_eval(spec, mid)) == std::signbit(kernel_eval(spec, lo)))
                    lo = mid;
                else
                    hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_v = v;
    }
    return roots;
}

KernelConstants compute_constants(const KernelSpec& spec, double beta, int quad_points,
                                  KappaConvention convention) {
    if (beta < 1.0) throw UsageError("beta must be >= 1");
    if (quad_points < spec.degree() + 2)
        throw UsageError("need at least degree+2 quadrature points");

    const double plain_kappa =
        integrate([&](double r) { double k = kernel_eval(spec, r); return k * k; },
                  -1.0, 1.0, quad_points);

    // |r|^beta |K(r)| has kinks at K's roots; integrate smooth pieces only
    std::vector<double> breaks;
    breaks.push_back(0.0);
    for (double r : kernel_positive_roots(spec)) {
        breaks.push_back(r);
        breaks.push_back(-r);
    }
    const double plain_kappa_beta = integrate_piecewise(
        [&](double r) { return std::pow(std::abs(r), beta) * std::abs(kernel_eval(spec, r)); },
        -1.0, 1.0, breaks, quad_points);

    const double kappa_bound = 3.0 * beta * beta * beta;
    const double kappa_beta_bound = 2.0 * std::sqrt(2.0) * (beta - 1.0);
    if (plain_kappa > kappa_bound)
        throw InternalError("kernel second moment " + std::to_string(plain_kappa) +
                            " exceeds 3 beta^3 = " + std::to_string(kappa_bound));
    if (plain_kappa_beta > kappa_beta_bound)
        throw InternalError("kernel absolute moment " + std::to_string(plain_kappa_beta) +
                            " exceeds 2 sqrt(2)(beta-1) = " + std::to_string(kappa_beta_bound));

    KernelConstants constants;
    constants.convention = convention;
    const double factor = (convention == KappaConvention::expectation) ? 0.5 : 1.0;
    constants.kappa = factor * plain_kappa;
    constants.kappa_beta = factor * plain_kappa_beta;
    return constants;
}

}  // namespace zo
