#include <benchmark/benchmark.h>

#include "gadi/gadi.hpp"
#include "gadi/inexact.hpp"
#include "gadi/krylov.hpp"
#include "gadi/problems.hpp"
#include "gadi/sylvester.hpp"

using namespace gadi;

static void BM_Spmv(benchmark::State& state) {
  const auto p = conv_diff_3d(static_cast<std::size_t>(state.range(0)));
  Vector y(p.A.rows());
  for (auto _ : state) {
    p.A.multiply(p.x_exact, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.A.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(16)->Arg(32)->Arg(48);

static void BM_CgShiftedHermitian(benchmark::State& state) {
  const auto p = conv_diff_3d(static_cast<std::size_t>(state.range(0)));
  const auto [H, S] = hs_split(p.A);
  const auto op = shifted_operator(H, 0.5);
  const Vector zero(p.A.rows(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(cg(op, p.b, zero, 1e-8, 10000));
}
BENCHMARK(BM_CgShiftedHermitian)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// One outer step of the practical scheme (CG + CGNE at 1e-2).
static void BM_PracticalGadiStep(benchmark::State& state) {
  const auto p = conv_diff_3d(static_cast<std::size_t>(state.range(0)));
  InexactConfig c;
  c.alpha = 0.07;
  c.omega = 1.9;
  c.max_outer = 1;
  for (auto _ : state) benchmark::DoNotOptimize(practical_gadi_hs(p.A, p.b, c));
}
BENCHMARK(BM_PracticalGadiStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_ExactGadiHsStep(benchmark::State& state) {
  const auto p = conv_diff_3d(static_cast<std::size_t>(state.range(0)));
  GadiConfig c;
  c.alpha = 0.6208;
  c.max_outer = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gadi_hs_solve(p.A, p.b, c));
}
BENCHMARK(BM_ExactGadiHsStep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_BandedLuFactor(benchmark::State& state) {
  const auto p = sylvester_family(static_cast<std::size_t>(state.range(0)), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(banded_lu_factor(p.A, 1, 1));
}
BENCHMARK(BM_BandedLuFactor)->Arg(256)->Arg(4096);

static void BM_BandedLuMultiSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = sylvester_family(n, 0.1);
  const auto F = banded_lu_factor(p.A, 1, 1);
  DenseMatrix R = p.C;
  for (auto _ : state) {
    R = p.C;
    F.solve_in_place(R);
    benchmark::DoNotOptimize(R.data().data());
  }
}
BENCHMARK(BM_BandedLuMultiSolve)->Arg(64)->Arg(256);

static void BM_GadiAb(benchmark::State& state) {
  const auto p = sylvester_family(static_cast<std::size_t>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(gadi_ab_solve(p.A, p.B, p.C, 0.33, 0.0));
}
BENCHMARK(BM_GadiAb)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
