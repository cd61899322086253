// Serial twins against OpenMP kernels for the quadrature assembly.

#include <cmath>

#include <benchmark/benchmark.h>

#include "argyris/fit.hpp"

using namespace argyris;

namespace {

double target(const Vec2& x) { return 2.0 * std::cos(x.x()) * std::sin(x.y()); }

Patch bench_patch(int n)
{
    return builtin_geometry("two_patch_curved_asg1", SpaceConfig{3, 1, n}).patches[0];
}

template <bool Parallel>
void BM_patch_mass(benchmark::State& state)
{
    const Patch P = bench_patch(static_cast<int>(state.range(0)));
    const QuadratureRule q = QuadratureRule::gauss(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? patch_mass(P, q) : patch_mass_serial(P, q));
}

template <bool Parallel>
void BM_patch_load(benchmark::State& state)
{
    const Patch P = bench_patch(static_cast<int>(state.range(0)));
    const QuadratureRule q = QuadratureRule::gauss(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? patch_load(P, target, q)
                                          : patch_load_serial(P, target, q));
}

template <bool Parallel>
void BM_patch_l2(benchmark::State& state)
{
    const Patch P = bench_patch(static_cast<int>(state.range(0)));
    const QuadratureRule q = QuadratureRule::gauss(8);
    const Eigen::MatrixXd u = P.X;
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? patch_l2(P, u, target, q)
                                          : patch_l2_serial(P, u, target, q));
}

template <bool Parallel>
void BM_assemble_mass(benchmark::State& state)
{
    const ArgyrisSpace A(
        builtin_geometry("five_patch_bilinear", SpaceConfig{3, 1, static_cast<int>(state.range(0))}));
    const QuadratureRule q = QuadratureRule::gauss(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_mass(A, q, Parallel));
}

} // namespace

BENCHMARK(BM_patch_mass<false>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_patch_mass<true>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_patch_load<false>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_patch_load<true>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_patch_l2<false>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_patch_l2<true>)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_mass<false>)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_mass<true>)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
