#include <benchmark/benchmark.h>

#include <vector>

#include "relaysim/detectors.hpp"
#include "relaysim/rng.hpp"

using namespace relaysim;

namespace {

struct Fixture {
  std::vector<ChannelSpec> links;
  std::vector<Observation> received;
  JointPmf pmf;
  MarginalSet marginals;

  explicit Fixture(int n)
      : links(static_cast<std::size_t>(n), ChannelSpec::known_stats(2.0, 1.0)),
        received(static_cast<std::size_t>(n)),
        pmf(JointPmf::uniform(n)),
        marginals{std::vector<double>(static_cast<std::size_t>(n), 0.9)} {
    Rng rng(5);
    std::vector<double> probs(std::size_t{1} << n);
    double sum = 0.0;
    for (double& v : probs) sum += (v = rng.uniform());
    for (double& v : probs) v /= sum;
    pmf = JointPmf(n, std::move(probs));
    for (double& y : received) y = 4.0 * (rng.uniform() - 0.5);
  }
};

}  // namespace

static void BM_MapDetect(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  DecisionContext ctx{f.received, f.links, &f.pmf, nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(map_detect(ctx));
}
BENCHMARK(BM_MapDetect)->Arg(2)->Arg(10);

static void BM_IdDetect(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  DecisionContext ctx{f.received, f.links, nullptr, &f.marginals};
  for (auto _ : state) benchmark::DoNotOptimize(id_detect(ctx));
}
BENCHMARK(BM_IdDetect)->Arg(2)->Arg(10);

static void BM_PjpDetect(benchmark::State& state) {
  Fixture f(10);
  DecisionContext ctx{f.received, f.links, nullptr, nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(pjp_detect(ctx, 6));
}
BENCHMARK(BM_PjpDetect);

static void BM_MrcDetect(benchmark::State& state) {
  Fixture f(10);
  DecisionContext ctx{f.received, f.links, nullptr, nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(mrc_detect(ctx));
}
BENCHMARK(BM_MrcDetect);
