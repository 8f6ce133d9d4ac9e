#include "nlslab/frequencies.hpp"
#include "nlslab/dnls_flow.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace nlslab;

StateField two_mode(int N) {
  const SpectralGrid g(N);
  std::vector<cplx> m(static_cast<std::size_t>(N));
  m[g.slot(1)] = 0.5;
  m[g.slot(-2)] = 0.2;
  return StateField::from_modes(g, m);
}

void BM_StrangStep(benchmark::State& state) {
  StateField u = two_mode(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    u = step_strang(u, 1e-4);
    benchmark::DoNotOptimize(u.modes().data());
  }
}
BENCHMARK(BM_StrangStep)->Arg(64)->Arg(128)->Arg(256);

void BM_Discriminant(benchmark::State& state) {
  const ZsOperator op(Potential::from_field(two_mode(static_cast<int>(state.range(0)))));
  double lambda = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.discriminant_jet(lambda));
    lambda += 1e-6;
  }
}
BENCHMARK(BM_Discriminant)->Arg(64)->Arg(128)->Arg(256);

void BM_Spectrum(benchmark::State& state) {
  const ZsOperator op(Potential::from_field(two_mode(128)));
  for (auto _ : state) benchmark::DoNotOptimize(periodic_spectrum(op, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Spectrum)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_SolveSigma(benchmark::State& state) {
  const auto gaps = periodic_spectrum(Potential::from_field(two_mode(128)), 24);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_sigma(gaps, n));
}
BENCHMARK(BM_SolveSigma)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
