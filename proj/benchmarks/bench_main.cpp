#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "circlestab/arcs.hpp"
#include "circlestab/complexes.hpp"
#include "circlestab/flows.hpp"
#include "circlestab/geometry.hpp"
#include "circlestab/linalg.hpp"
#include "circlestab/random.hpp"

using namespace circlestab;

namespace {

IntMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  KeyedRng rng(seed);
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = static_cast<std::int64_t>(rng.below(19)) - 9;
  return m;
}

void BM_SmithNormalForm(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(m));
}
BENCHMARK(BM_SmithNormalForm)->Arg(4)->Arg(8);

void BM_InjectiveWordsHomology(benchmark::State& state) {
  std::vector<Vertex> s(static_cast<std::size_t>(state.range(0)));
  std::iota(s.begin(), s.end(), 0);
  const auto x = ordered_injective_words(s);
  for (auto _ : state) benchmark::DoNotOptimize(homology(x, -1, state.range(0) - 1, Coefficients::integers(), true));
}
BENCHMARK(BM_InjectiveWordsHomology)->DenseRange(3, 5);

void BM_CurveDistance(benchmark::State& state) {
  const Circle a({0.5, 0.5, 0.5}, 0.1, Vec3::UnitZ());
  const Circle b({0.55, 0.52, 0.5}, 0.08, Vec3(1, 0.3, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(curve_distance(a, b));
}
BENCHMARK(BM_CurveDistance);

void BM_RunToGood(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  GeneratorParams params;
  params.jitter_moves = static_cast<int>(6 * k);
  const auto cfg = random_unlinked(k, 3, params);
  for (auto _ : state) benchmark::DoNotOptimize(run_to_good(cfg, k / 2));
}
BENCHMARK(BM_RunToGood)->Arg(6)->Arg(12);

void BM_Resolve(benchmark::State& state) {
  const auto cfg = random_unlinked(static_cast<std::size_t>(state.range(0)), 1);
  const auto targets = good_circles(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(resolve(cfg, targets));
}
BENCHMARK(BM_Resolve)->Arg(3);

}  // namespace
BENCHMARK_MAIN();
