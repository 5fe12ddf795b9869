#include "zo/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "zo/errors.hpp"

namespace zo {
namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
struct LegendreEval {
    double p;
    double dp;
};

LegendreEval legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard identity (1-x^2) P_n' = n (P_{n-1} - x P_n)
    const double dp = n * (p0 - x * p1) / (1.0 - x * x);
    return {p1, dp};
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw UsageError("quadrature order must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-style initial guess, then Newton
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        LegendreEval e{};
        for (int it = 0; it < 100; ++it) {
            e = legendre(n, x);
            const double step = e.p / e.dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        e = legendre(n, x);
        const double w = 2.0 / ((1.0 - x * x) * e.dp * e.dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const auto rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), halfw = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.weights[i] * f(mid + halfw * rule.nodes[i]);
    return halfw * s;
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints, int n) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        s += integrate(f, pts[i], pts[i + 1], n);
    return s;
}

}  // namespace zo
