#include <benchmark/benchmark.h>

#include "kscat/layer_ops.hpp"
#include "kscat/operator_core.hpp"
#include "kscat/potential_ops.hpp"

using namespace kscat;

static void BM_AssembleS(benchmark::State& state) {
    SurfaceMesh mesh = make_sphere(1.0, int(state.range(0)));
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    for (auto _ : state) {
        BoundaryOperator op = assemble_S(mesh, z);
        benchmark::DoNotOptimize(op.matrix.data());
    }
    state.SetLabel(std::to_string(mesh.n_p0()) + " panels");
}
BENCHMARK(BM_AssembleS)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_AssembleD(benchmark::State& state) {
    SurfaceMesh mesh = make_sphere(1.0, int(state.range(0)));
    auto z = SpectralParam::interior(Complex(1.0, 0.0));
    for (auto _ : state) {
        BoundaryOperator op = assemble_D(mesh, z);
        benchmark::DoNotOptimize(op.matrix.data());
    }
    state.SetLabel(std::to_string(mesh.n_p1()) + " vertices");
}
BENCHMARK(BM_AssembleD)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_KreinResolvent(benchmark::State& state) {
    SystemSampler smp(1);
    KreinSystem sys = smp.sample(state.range(0), 4, 4, true);
    const Complex z(1.3, 0.8);
    for (auto _ : state) {
        MatrixC r = krein_resolvent(sys, z);
        benchmark::DoNotOptimize(r.data());
    }
}
BENCHMARK(BM_KreinResolvent)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_LippmannSchwinger(benchmark::State& state) {
    auto pot = PotentialSpec::gaussian(1.0, 0.5, 1.2);
    VolumeGrid grid = make_volume_grid(pot, 1.2 / double(state.range(0)));
    auto z = SpectralParam::interior(Complex(1.0, 0.5));
    for (auto _ : state) {
        LSFactorization ls(grid, z);
        benchmark::DoNotOptimize(ls.cond());
    }
    state.SetLabel(std::to_string(grid.size()) + " cells");
}
BENCHMARK(BM_LippmannSchwinger)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
