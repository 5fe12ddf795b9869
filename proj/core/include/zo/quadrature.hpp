#pragma once

#include <functional>
#include <vector>

namespace zo {

// Gauss-Legendre rule on [-1,1]: n nodes integrate polynomials up to
// degree 2n-1 exactly. Nodes are Newton-refined roots of P_n.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

// integral of f over [a,b] with an n-point rule mapped onto the interval
double integrate(const std::function<double(double)>& f, double a, double b, int n);

// integral over [a,b] split at the given interior breakpoints; use when the
// integrand has kinks (e.g. absolute values) so each piece is smooth
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints, int n);

}  // namespace zo
