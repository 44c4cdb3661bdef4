// Serial reference against the OpenMP path for the three heavy builders.
// Run with FLOQUET_THREADS or OMP_NUM_THREADS to vary the team size.

#include <benchmark/benchmark.h>

#include "floquet/spectral_engine.hpp"
#include "floquet/toroidal_kernel.hpp"

using namespace floquet;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_FiberMatrix(benchmark::State& state) {
    auto F = schrodinger_cosine(2);
    DualWindow w(2, 12);
    for (auto _ : state) benchmark::DoNotOptimize(build_fiber_matrix(F, {0.1, 0.2}, w, exec_of(state)));
}

void BM_Kernel(benchmark::State& state) {
    auto F = schrodinger_cosine(2);
    CutoffProfile cut{3.0};
    Vec xi{0.1, 0.2};
    DualWindow w(2, default_kernel_radius(xi, cut.N));
    GridSpec grid{2, 16};
    for (auto _ : state) benchmark::DoNotOptimize(build_kernel(F, xi, w, grid, &cut, exec_of(state)));
}

void BM_Magnetic(benchmark::State& state) {
    auto F = schrodinger_cosine(1);
    CutoffProfile cut{8.0};
    VectorPotential A(1);
    A.periodic[0].add({1}, 0.1).add({-1}, 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            magnetic_fiber_matrix(F, A, {0.2}, DualWindow(1, 8), GridSpec{1, 64}, &cut, {}, exec_of(state)));
}

void BM_Bands(benchmark::State& state) {
    auto F = schrodinger_cosine(2);
    MomentumPath path{{{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}}, 8};
    for (auto _ : state)
        benchmark::DoNotOptimize(bands(F, path, DualWindow(2, 6), 8, nullptr, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_FiberMatrix)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kernel)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Magnetic)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bands)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
