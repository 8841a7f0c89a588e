#include <benchmark/benchmark.h>

#include "relaysim/channel.hpp"
#include "relaysim/rng.hpp"

using namespace relaysim;

static void BM_SampleObservationStats(benchmark::State& state) {
  const ChannelSpec spec = ChannelSpec::known_stats(2.0, 1.0);
  Rng rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_observation(1, spec, rng));
}
BENCHMARK(BM_SampleObservationStats);

static void BM_LlrStats(benchmark::State& state) {
  const StatsLikelihoodParams p = StatsLikelihoodParams::make(1.0, 2.0);
  Rng rng(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(llr_stats(8.0 * (rng.uniform() - 0.5), p));
}
BENCHMARK(BM_LlrStats);

static void BM_LlrStatsTail(benchmark::State& state) {
  const StatsLikelihoodParams p = StatsLikelihoodParams::make(1.0, 2.0);
  double y = 30.0 / p.a;
  for (auto _ : state) benchmark::DoNotOptimize(llr_stats(y, p));
}
BENCHMARK(BM_LlrStatsTail);

static void BM_BerFirstHop(benchmark::State& state) {
  const ChannelSpec spec = ChannelSpec::known_stats(2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ber_first_hop(spec));
}
BENCHMARK(BM_BerFirstHop);
