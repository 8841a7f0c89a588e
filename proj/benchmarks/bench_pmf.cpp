#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "relaysim/pmf.hpp"
#include "relaysim/rng.hpp"

using namespace relaysim;

static void BM_ProjectSimplex(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> b(m);
  for (double& v : b) v = 2.0 * rng.uniform() - 0.5;
  const double sum = std::accumulate(b.begin(), b.end(), 0.0);
  for (double& v : b) v += (1.0 - sum) / static_cast<double>(m);
  for (auto _ : state) benchmark::DoNotOptimize(project_simplex(b));
}
BENCHMARK(BM_ProjectSimplex)->Arg(16)->Arg(256)->Arg(1024);

static void BM_TransitionSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  std::vector<double> pc(static_cast<std::size_t>(n));
  for (double& v : pc) v = 0.6 + 0.35 * rng.uniform();
  std::vector<double> p(std::size_t{1} << n);
  double sum = 0.0;
  for (double& v : p) sum += (v = rng.uniform());
  for (double& v : p) v /= sum;
  for (auto _ : state) benchmark::DoNotOptimize(transition_solve(p, pc));
}
BENCHMARK(BM_TransitionSolve)->Arg(6)->Arg(10);

static void BM_ProductPmf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MarginalSet m;
  for (int i = 0; i < n; ++i) m.p_correct.push_back(0.9);
  for (auto _ : state) benchmark::DoNotOptimize(product_pmf(m));
}
BENCHMARK(BM_ProductPmf)->Arg(10);
