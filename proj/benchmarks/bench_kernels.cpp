#include "cosym/curvature.hpp"
#include "cosym/families.hpp"
#include "cosym/geodesic.hpp"
#include "cosym/olszak.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace cosym;

namespace {

std::vector<double> point(int n)
{
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = 0.1 * (i + 1) - 0.25;
    }
    return x;
}

void BM_Jet(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = build_d1_metric(d1_example(n));
    const auto x = point(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_jet(g, x, 3));
    }
}

void BM_Curvature(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto jet = evaluate_jet(build_d2_metric(d2_example(surface_nonparallel_fixture(), n)), point(n), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_curvature(jet));
    }
}

void BM_Fiber(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto b = compute_curvature(evaluate_jet(build_d2_metric(d2_example(surface_nonparallel_fixture(), n)), point(n), 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(olszak_fiber(b));
    }
}

void BM_FMap(benchmark::State& state)
{
    const auto family = d1_example(4);
    const auto field = build_d1_metric(family);
    const std::vector<double> psi0{0.2, 0.1};
    const std::vector<double> w{0.3, -0.2};
    const auto spec = make_f_map_spec(family, psi0, w, 0.6);
    const std::vector<double> psi{0.1, -0.05};
    for (auto _ : state) {
        benchmark::DoNotOptimize(f_map(spec, field, 0.2, 0.1, psi, 1e-8));
    }
}

} // namespace

BENCHMARK(BM_Jet)->DenseRange(4, 6);
BENCHMARK(BM_Curvature)->DenseRange(4, 6);
BENCHMARK(BM_Fiber)->DenseRange(4, 6);
BENCHMARK(BM_FMap);
BENCHMARK_MAIN();
