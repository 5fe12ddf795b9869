#pragma once

#include <string>
#include <vector>

#include "zo/vec.hpp"

namespace zo {

// Odd polynomial smoothing kernel K on [-1,1]. Against the uniform law on
// [-1,1] it must satisfy E[K] = 0, E[rK] = 1 and E[r^j K] = 0 for j = 2..l,
// where l is the largest integer strictly below the highest smoothness
// order the kernel serves.
struct KernelSpec {
    std::vector<int> beta_targets;     // smoothness orders served, e.g. {3,4}
    std::vector<double> coefficients;  // ascending power basis, even entries 0
    int l = 0;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

enum class KappaConvention { expectation, plain_integral };

// kappa   = second moment of K, kappa_beta = |u|^beta-weighted absolute
// moment. The two conventions differ by a factor 2: expectation uses the
// uniform law on [-1,1] (density 1/2), plain_integral the bare integral.
struct KernelConstants {
    double kappa = 0.0;
    double kappa_beta = 0.0;
    KappaConvention convention = KappaConvention::expectation;
};

struct MomentCheck {
    int j = 0;           // moment order
    double value = 0.0;  // E[r^j K(r)] under the uniform law
    double target = 0.0; // 0, except 1 at j=1
    bool pass = false;
};

struct MomentReport {
    std::vector<MomentCheck> moments;
    double tolerance = 1e-10;
    bool all_pass = false;
    std::string first_failure;  // "j=2" style tag, empty when clean
};

// Shipped kernels. beta in {3,4} -> degree-3 polynomial, beta in {5,6} ->
// degree-5. Unsupported beta throws UsageError naming the supported set.
KernelSpec legendre_kernel(int beta);

// Polynomial value; |r| > 1 throws UsageError.
double kernel_eval(const KernelSpec& spec, double r);

// Checks the moment conditions by Gauss-Legendre quadrature (exact for
// polynomial integrands when quad_points >= degree+2).
MomentReport validate_moments(const KernelSpec& spec, int quad_points);

// Computes kappa and kappa_beta in the requested convention. The absolute
// moment is integrated piecewise between the kernel's roots because |K| has
// kinks there. Verifies kappa <= 3 beta^3 and kappa_beta <= 2 sqrt(2)(beta-1)
// on the plain-integral values; violation throws InternalError.
KernelConstants compute_constants(const KernelSpec& spec, double beta, int quad_points,
                                  KappaConvention convention = KappaConvention::expectation);

// Positive roots of K in (0,1), found by sign scan plus bisection; used for
// piecewise integration of |K|.
std::vector<double> kernel_positive_roots(const KernelSpec& spec);

const char* to_string(KappaConvention c);

}  // namespace zo
