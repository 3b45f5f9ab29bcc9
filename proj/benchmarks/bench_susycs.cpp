#include <benchmark/benchmark.h>

#include <numbers>

#include "susycs/analysis.hpp"
#include "susycs/fock.hpp"
#include "susycs/kmatrix.hpp"
#include "susycs/observables.hpp"
#include "susycs/states.hpp"

namespace {

using namespace susycs;

constexpr double kPi = std::numbers::pi;

void BM_EigenDecompose(benchmark::State& state) {
  const KMatrix k{cplx(0.3, 0.1), 0.7, cplx(-1.1, 0.4), 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(eigen_decompose(k));
}
BENCHMARK(BM_EigenDecompose);

void BM_MixedState(benchmark::State& state) {
  const KMatrix k = theta_operator(kPi / 4);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_state(k, cplx(0.5, 0.5), 0.3, kPi / 4, kPi / 4));
}
BENCHMARK(BM_MixedState);

void BM_ToFock(benchmark::State& state) {
  const double zmag = static_cast<double>(state.range(0));
  const SuperState s = mixed_state(theta_operator(kPi / 4), std::polar(zmag, kPi / 4), 0.0, kPi / 4, kPi / 4);
  for (auto _ : state) benchmark::DoNotOptimize(to_fock(s, 1e-14));
}
BENCHMARK(BM_ToFock)->Arg(1)->Arg(2);

void BM_FockSolve(benchmark::State& state) {
  const KMatrix k = theta_operator(0.6);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fock_solve(k, cplx(1.0, 0.5), 1.0, 0.3, 0.0, n));
}
BENCHMARK(BM_FockSolve)->Arg(40)->Arg(200);

void BM_UncertaintyMixed(benchmark::State& state) {
  const SuperState s = mixed_state(theta_operator(3 * kPi / 4), 50.0, 0.0, kPi / 4, kPi / 4);
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty(s));
}
BENCHMARK(BM_UncertaintyMixed);

void BM_UncertaintyDegenerateBasis(benchmark::State& state) {
  const SuperState s = degenerate_basis({1.0, 1.0, -0.25, 2.0}, cplx(1.0, 0.5), 0.0).first;
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty(s));
}
BENCHMARK(BM_UncertaintyDegenerateBasis);

void BM_Sweep(benchmark::State& state) {
  SweepSpec spec;
  spec.theta = {0.0, kPi, 41};
  spec.zmag = {0.0, 3.0, 31};
  spec.eta = spec.lambda = kPi / 4;
  spec.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec));
  state.SetItemsProcessed(state.iterations() * 41 * 31);
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_FitDivergence(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_divergence(3 * kPi / 4, kPi / 4, {10.0, 100.0}, 20, kPi / 4, kPi / 4));
}
BENCHMARK(BM_FitDivergence);

}  // namespace

BENCHMARK_MAIN();
