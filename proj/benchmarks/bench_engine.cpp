#include <benchmark/benchmark.h>

#include "relaysim/engine.hpp"

using namespace relaysim;

namespace {

SimConfig mesh_config(DetectorKind det, PmfSchemeKind scheme) {
  SimConfig c;
  c.topology = TopologyKind::mesh;
  c.hops = 9;
  c.nodes_per_group = 10;
  c.mode = FadingMode::known_stats;
  c.snr_db = 3.0;
  c.detector = det;
  c.scheme = scheme;
  c.mcs_samples = 2000;
  c.recursion_samples = 2000;
  c.seed = 1;
  return c;
}

}  // namespace

static void BM_TrialMeshId(benchmark::State& state) {
  const SimConfig c = mesh_config(DetectorKind::id, PmfSchemeKind::id_analytic);
  const NetworkTopology topo = build_network(c);
  const PmfPipeline pipe = build_pipeline(c, topo, 2);
  std::uint64_t t = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(c.seed, 1, t++);
    benchmark::DoNotOptimize(run_trial(c, topo, pipe, rng));
  }
}
BENCHMARK(BM_TrialMeshId);

static void BM_TrialMeshMap(benchmark::State& state) {
  const SimConfig c = mesh_config(DetectorKind::full_map, PmfSchemeKind::mcs);
  const NetworkTopology topo = build_network(c);
  const PmfPipeline pipe = build_pipeline(c, topo, 2);
  std::uint64_t t = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(c.seed, 1, t++);
    benchmark::DoNotOptimize(run_trial(c, topo, pipe, rng));
  }
}
BENCHMARK(BM_TrialMeshMap);

static void BM_PipelineId(benchmark::State& state) {
  const SimConfig c = mesh_config(DetectorKind::id, PmfSchemeKind::id_analytic);
  const NetworkTopology topo = build_network(c);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_pipeline(c, topo, 2));
}
BENCHMARK(BM_PipelineId);

BENCHMARK_MAIN();
