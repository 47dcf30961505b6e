#include <benchmark/benchmark.h>

#include <freqsketch/mappers.hpp>
#include <freqsketch/transforms.hpp>

namespace {

using namespace freqsketch;

MapperConfig config(std::uint32_t r, double t) {
  MapperConfig c;
  c.r = r;
  c.t = t;
  c.seed = 1;
  return c;
}

void BM_point(benchmark::State& state) {
  const ElementMapper m(config(static_cast<std::uint32_t>(state.range(0)), 0.1));
  const Element e{"some-key", 2.0};
  std::uint64_t i = 0, outputs = 0;
  for (auto _ : state) m.point(e, {0, i++}, [&](const OutputElement&) { ++outputs; });
  benchmark::DoNotOptimize(outputs);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_point)->Arg(10)->Arg(100)->Arg(1000);

// Cost is linear in the output count rather than in r.
void BM_point_fast(benchmark::State& state) {
  const ElementMapper m(config(static_cast<std::uint32_t>(state.range(0)), 0.1));
  const Element e{"some-key", 2.0};
  std::uint64_t i = 0, outputs = 0;
  for (auto _ : state) m.point_fast(e, {0, i++}, [&](const OutputElement&) { ++outputs; });
  benchmark::DoNotOptimize(outputs);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_point_fast)->Arg(10)->Arg(100)->Arg(1000);

void BM_combination_sqrt(benchmark::State& state) {
  MapperConfig c = config(static_cast<std::uint32_t>(state.range(0)), 1.0);
  c.a = inverse_sqrt();
  const ElementMapper m(c);
  const Element e{"some-key", 2.0};
  std::uint64_t i = 0;
  double total = 0.0;
  for (auto _ : state) m.combination(e, {0, i++}, [&](const OutputElement& o) { total += o.value; });
  benchmark::DoNotOptimize(total);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_combination_sqrt)->Arg(10)->Arg(100);

void BM_full_range(benchmark::State& state) {
  const ElementMapper m(config(static_cast<std::uint32_t>(state.range(0)), 1.0));
  const Element e{"some-key", 2.0};
  std::uint64_t i = 0;
  double total = 0.0;
  for (auto _ : state) m.full_range(e, {0, i++}, [&](const OutputElement& o) { total += o.value; });
  benchmark::DoNotOptimize(total);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_full_range)->Arg(10)->Arg(100);

}  // namespace
