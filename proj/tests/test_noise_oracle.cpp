#include <doctest.h>

#include <cmath>
#include <limits>

#include "zo/errors.hpp"
#include "zo/noise.hpp"
#include "zo/oracle.hpp"

using zo::NoiseModel;
using zo::NoiseVariant;
using zo::Vec;

TEST_CASE("noise: none is identically zero") {
    zo::RngStream rng(1);
    const NoiseModel m{NoiseVariant::none, 0.5};
    for (int i = 0; i < 100; ++i) CHECK(zo::noise_sample(m, rng, 1.0) == 0.0);
}

TEST_CASE("noise: adversarial sign follows the hint") {
    zo::RngStream rng(1);
    const NoiseModel m{NoiseVariant::adversarial_sign, 0.5};
    CHECK(zo::noise_sample(m, rng, -2.0) == -0.5);
    CHECK(zo::noise_sample(m, rng, 3.0) == 0.5);
    CHECK(zo::noise_sample(m, rng, 0.0) == 0.5);  // sign(0) := +1
}

TEST_CASE("noise: negative delta is rejected") {
    zo::RngStream rng(1);
    const NoiseModel m{NoiseVariant::uniform, -0.1};
    CHECK_THROWS_AS(zo::noise_sample(m, rng, 1.0), zo::UsageError);
}

TEST_CASE("noise: uniform variant is bounded with second moment delta^2") {
    zo::RngStream rng(7);
    const double delta = 0.3;
    const NoiseModel m{NoiseVariant::uniform, delta};
    const double lim = std::sqrt(3.0) * delta;
    double sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double xi = zo::noise_sample(m, rng, 1.0);
        REQUIRE(std::abs(xi) <= lim);
        sum_sq += xi * xi;
    }
    const double m2 = sum_sq / n;
    CHECK(m2 <= 1.05 * delta * delta);
    CHECK(m2 >= 0.90 * delta * delta);
}

TEST_CASE("noise: clipped gaussian stays in [-3 delta, 3 delta] within budget") {
    zo::RngStream rng(11);
    const NoiseModel m{NoiseVariant::gaussian_clipped, 1.0};
    double sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double xi = zo::noise_sample(m, rng, 1.0);
        REQUIRE(std::abs(xi) <= 3.0);
        sum_sq += xi * xi;
    }
    const double m2 = sum_sq / n;
    CHECK(m2 <= 1.05);
    CHECK(m2 >= 0.90);
}

TEST_CASE("noise: variant names round-trip") {
    for (auto v : {NoiseVariant::none, NoiseVariant::uniform, NoiseVariant::gaussian_clipped,
                   NoiseVariant::adversarial_sign})
        CHECK(zo::noise_variant_from_string(zo::to_string(v)) == v);
    CHECK_THROWS_AS(zo::noise_variant_from_string("cauchy"), zo::UsageError);
}

namespace {

zo::Objective quadratic_objective(int d) {
    zo::Objective obj;
    obj.dim = d;
    obj.value = [](const Vec& x) { return zo::dot(x, x); };
    obj.grad = [](const Vec& x) {
        Vec g = x;
        zo::scale(g, 2.0);
        return g;
    };
    obj.L = 2.0;
    return obj;
}

}  // namespace

TEST_CASE("oracle: noise-free query returns f exactly and counts calls") {
    zo::ZeroOrderOracle oracle(quadratic_objective(3), {NoiseVariant::none, 0.0});
    zo::RngStream rng(1);
    const Vec x{1.0, 2.0, 3.0};
    CHECK(oracle.query(x, rng) == 14.0);
    CHECK(oracle.query(x, rng) == 14.0);
    CHECK(oracle.query_count() == 2);
    oracle.reset_query_count();
    CHECK(oracle.query_count() == 0);
}

TEST_CASE("oracle: dimension mismatch is a usage error") {
    zo::ZeroOrderOracle oracle(quadratic_objective(3), {NoiseVariant::none, 0.0});
    zo::RngStream rng(1);
    CHECK_THROWS_AS(oracle.query(Vec{1.0, 2.0}, rng), zo::UsageError);
    CHECK_THROWS_AS(oracle.query(Vec{1.0, std::numeric_limits<double>::quiet_NaN(), 0.0}, rng),
                    zo::UsageError);
}

TEST_CASE("oracle: non-finite objective value is an evaluation error") {
    zo::Objective obj;
    obj.dim = 1;
    obj.value = [](const Vec&) { return std::numeric_limits<double>::infinity(); };
    zo::ZeroOrderOracle oracle(std::move(obj), {NoiseVariant::none, 0.0});
    zo::RngStream rng(1);
    CHECK_THROWS_AS(oracle.query(Vec{0.0}, rng), zo::EvaluationError);
}

TEST_CASE("oracle: identical seeds give identical query sequences") {
    zo::ZeroOrderOracle a(quadratic_objective(2), {NoiseVariant::uniform, 0.1});
    zo::ZeroOrderOracle b(quadratic_objective(2), {NoiseVariant::uniform, 0.1});
    zo::RngStream ra(99), rb(99);
    const Vec x{0.5, -0.5};
    for (int i = 0; i < 50; ++i) CHECK(a.query(x, ra) == b.query(x, rb));
}

TEST_CASE("oracle: one-point feedback draws fresh noise per query") {
    zo::ZeroOrderOracle oracle(quadratic_objective(2), {NoiseVariant::uniform, 0.1});
    zo::RngStream rng(5);
    const Vec x{0.5, -0.5};
    const double v1 = oracle.query(x, rng);
    const double v2 = oracle.query(x, rng);
    CHECK(v1 != v2);
}

TEST_CASE("oracle: analytic gradient matches finite differences on random points") {
    const auto obj = quadratic_objective(4);
    zo::RngStream rng(17);
    const double step = 1e-6;
    for (int p = 0; p < 100; ++p) {
        Vec x(4);
        for (auto& xi : x) xi = rng.next_gaussian();
        const Vec g = obj.grad(x);
        for (int i = 0; i < 4; ++i) {
            Vec hi = x, lo = x;
            hi[i] += step;
            lo[i] -= step;
            const double fd = (obj.value(hi) - obj.value(lo)) / (2.0 * step);
            CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(1.0, std::abs(g[i])));
        }
    }
}
