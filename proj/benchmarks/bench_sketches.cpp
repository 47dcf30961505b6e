#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <freqsketch/sketches.hpp>

namespace {

using namespace freqsketch;

std::vector<OutputElement> stream(std::size_t n) {
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> val(1.0);
  std::vector<OutputElement> xs(n);
  for (auto& o : xs) o = {gen(), val(gen)};
  return xs;
}

const std::vector<OutputElement>& data() {
  static const auto xs = stream(1 << 16);
  return xs;
}

void BM_distinct_update(benchmark::State& state) {
  const auto& xs = data();
  for (auto _ : state) {
    DistinctCounter s(static_cast<std::uint32_t>(state.range(0)), 1);
    for (const auto& o : xs) s.update(o.outkey);
    benchmark::DoNotOptimize(s.estimate());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * xs.size()));
}
BENCHMARK(BM_distinct_update)->Arg(100)->Arg(1000);

void BM_max_distinct_update(benchmark::State& state) {
  const auto& xs = data();
  for (auto _ : state) {
    MaxDistinctSketch s(static_cast<std::uint32_t>(state.range(0)), 1);
    for (const auto& o : xs) s.update(o);
    benchmark::DoNotOptimize(s.estimate());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * xs.size()));
}
BENCHMARK(BM_max_distinct_update)->Arg(100)->Arg(1000);

void BM_all_threshold_update(benchmark::State& state) {
  const auto& xs = data();
  for (auto _ : state) {
    AllThresholdSketch s(static_cast<std::uint32_t>(state.range(0)), 1);
    for (const auto& o : xs) s.update(o);
    benchmark::DoNotOptimize(s.estimate(1.0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * xs.size()));
}
BENCHMARK(BM_all_threshold_update)->Arg(100)->Arg(1000);

void BM_all_threshold_merge(benchmark::State& state) {
  const auto& xs = data();
  AllThresholdSketch a(100, 1), b(100, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) (i % 2 ? a : b).update(xs[i]);
  for (auto _ : state) benchmark::DoNotOptimize(AllThresholdSketch::merged(a, b).estimate(1.0));
}
BENCHMARK(BM_all_threshold_merge);

void BM_sum_update(benchmark::State& state) {
  const auto& xs = data();
  for (auto _ : state) {
    SumCounter s;
    for (const auto& o : xs) s.update(o.value);
    benchmark::DoNotOptimize(s.value());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * xs.size()));
}
BENCHMARK(BM_sum_update);

}  // namespace
