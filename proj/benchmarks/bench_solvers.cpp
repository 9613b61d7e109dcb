// Microbenchmarks for the hot paths: the spectral transform round trip, the
// two linear functional-equation solvers, and a full curve solve.
#include <benchmark/benchmark.h>

#include <numbers>
#include <random>
#include <vector>

#include "qpfc/cohomology.hpp"
#include "qpfc/curves.hpp"

using namespace qpfc;

namespace {

PeriodicFunction random_function(int order, unsigned seed, double amplitude,
                                 bool zero_mean = false) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> c(2 * order + 1);
  for (int n = 1; n <= std::min(order, 4); ++n) {
    std::complex<double> v(u(rng), u(rng));
    v *= amplitude * std::pow(0.5, n - 1);
    c[order + n] = v;
    c[order - n] = std::conj(v);
  }
  c[order] = zero_mean ? 0.0 : amplitude * u(rng);
  return PeriodicFunction::from_coefficients(std::move(c));
}

void BM_FromSamples(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const PeriodicFunction f = random_function(order, 5, 1.0);
  const std::vector<double> values = f.sample(4 * order);
  for (auto _ : state) {
    benchmark::DoNotOptimize(PeriodicFunction::from_samples(values, order));
  }
}
BENCHMARK(BM_FromSamples)->Arg(64)->Arg(256)->Arg(1024);

void BM_SolveConstant(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Frequency golden = Frequency::golden();
  const PeriodicFunction p = random_function(order, 7, 1.0, /*zero_mean=*/true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_constant(p, golden));
  }
}
BENCHMARK(BM_SolveConstant)->Arg(64)->Arg(256)->Arg(1024);

void BM_SolveLinde(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Frequency golden = Frequency::golden();
  const PeriodicFunction a =
      PeriodicFunction::constant(1.0, order) + random_function(order, 11, 0.05, true);
  const PeriodicFunction p = random_function(order, 13, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_linde(a, p, golden));
  }
}
BENCHMARK(BM_SolveLinde)->Arg(32)->Arg(128)->Arg(256);

void BM_SolveLindeDense(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Frequency golden = Frequency::golden();
  const PeriodicFunction a =
      PeriodicFunction::constant(1.0, order) + random_function(order, 11, 0.05, true);
  const PeriodicFunction p = random_function(order, 13, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_linde_dense(a, p, golden, 2 * order + 1));
  }
}
BENCHMARK(BM_SolveLindeDense)->Arg(32)->Arg(128);

void BM_TranslatedCurve(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Frequency golden = Frequency::golden();
  const ForcedMap map = builtin_transformed_arnold(0.1, 1.0, 0.3, golden);
  CurveOptions opts;
  opts.modes = order;
  for (auto _ : state) {
    benchmark::DoNotOptimize(translated_curve(map, 0.05, golden, 0.6, opts));
  }
}
BENCHMARK(BM_TranslatedCurve)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
