// Microbenchmarks for the hot paths: direction sampling, kernel evaluation,
// the batched estimator at growing batch sizes, the momentum schedule, and
// the spectral-norm power iteration.

#include <benchmark/benchmark.h>

#include "zo/accsgd.hpp"
#include "zo/estimator.hpp"
#include "zo/kernel.hpp"
#include "zo/oracle.hpp"
#include "zo/problems.hpp"
#include "zo/rng.hpp"

namespace {

zo::Objective quadratic(int d) {
    zo::Objective obj;
    obj.dim = d;
    obj.value = [](const zo::Vec& x) { return zo::dot(x, x); };
    obj.grad = [](const zo::Vec& x) {
        zo::Vec g = x;
        zo::scale(g, 2.0);
        return g;
    };
    obj.L = 2.0;
    return obj;
}

void bm_sample_sphere(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    zo::RngStream rng(42);
    for (auto _ : state) benchmark::DoNotOptimize(zo::sample_sphere(d, rng));
}
BENCHMARK(bm_sample_sphere)->Arg(8)->Arg(64)->Arg(512);

void bm_kernel_eval(benchmark::State& state) {
    const auto kernel = zo::legendre_kernel(static_cast<int>(state.range(0)));
    double r = -1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(zo::kernel_eval(kernel, r));
        r = r >= 1.0 ? -1.0 : r + 1.0 / 64.0;
    }
}
BENCHMARK(bm_kernel_eval)->Arg(3)->Arg(5);

void bm_batched_estimate(benchmark::State& state) {
    const int d = 64;
    const int B = static_cast<int>(state.range(0));
    zo::ZeroOrderOracle oracle(quadratic(d), {zo::NoiseVariant::uniform, 1e-4});
    zo::EstimatorConfig cfg;
    cfg.h = 0.1;
    cfg.B = B;
    cfg.kernel = zo::legendre_kernel(3);
    const zo::Vec x(d, 0.5);
    zo::RngStream rng(7);
    std::uint64_t k = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(zo::batched_estimate(oracle, cfg, x, rng.split(k++)));
    state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(bm_batched_estimate)->Arg(1)->Arg(16)->Arg(128)->Arg(1024);

void bm_schedule_advance(benchmark::State& state) {
    zo::AccSgdParams params;
    params.rho_B = 96.0;
    params.eta = 0.01;
    for (auto _ : state) {
        params = zo::schedule_advance(params);
        benchmark::DoNotOptimize(params.alpha);
        if (params.k > 1'000'000) params = zo::AccSgdParams{0.01, 96.0};
    }
}
BENCHMARK(bm_schedule_advance);

void bm_power_iteration(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto problem = zo::least_squares_make(d, d, 11, 100.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(zo::power_iteration_sq(
            [&](const zo::Vec& v) { return problem.A.apply(v); },
            [&](const zo::Vec& v) { return problem.A.apply_transpose(v); }, d));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_power_iteration)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
