#include "relaysim/pmf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

namespace relaysim {

int JointPmf::node_cap_ = 20;

namespace {

constexpr double kSumTolerance = 1e-6;

std::size_t checked_size(int nodes) {
  if (nodes < 1) throw std::invalid_argument("group size must be >= 1");
  if (nodes > JointPmf::node_cap())
    throw std::invalid_argument("group size " + std::to_string(nodes) +
                                " exceeds joint pmf cap " +
                                std::to_string(JointPmf::node_cap()));
  return std::size_t{1} << nodes;
}

}  // namespace

JointPmf::JointPmf(int nodes, std::vector<double> probs) : nodes_(nodes) {
  const std::size_t want = checked_size(nodes);
  if (probs.size() != want)
    throw std::invalid_argument("joint pmf needs 2^n entries");
  double sum = 0.0;
  for (double& v : probs) {
    if (!(v >= -1e-12))
      throw std::invalid_argument("joint pmf entries must be nonnegative");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("joint pmf must sum to one");
  for (double& v : probs) v /= sum;
  probs_ = std::move(probs);
}

JointPmf JointPmf::point_mass(int nodes, std::size_t index) {
  const std::size_t n = checked_size(nodes);
  if (index >= n) throw std::invalid_argument("point mass index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return JointPmf(nodes, std::move(p));
}

JointPmf JointPmf::uniform(int nodes) {
  const std::size_t n = checked_size(nodes);
  return JointPmf(nodes, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void JointPmf::set_node_cap(int cap) {
  if (cap < 1 || cap > 30) throw std::invalid_argument("node cap out of range");
  node_cap_ = cap;
}

UninformativeNodeError::UninformativeNodeError(int node_index)
    : std::runtime_error("node " + std::to_string(node_index) +
                         " has p_c = 1/2; its transition block is singular "
                         "and the node must be dropped"),
      node(node_index) {}

std::size_t encode(std::span<const Symbol> decisions) {
  if (decisions.empty() || decisions.size() > 63)
    throw std::invalid_argument("encode: bad vector length");
  std::size_t index = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] == 1)
      index |= std::size_t{1} << i;
    else if (decisions[i] != -1)
      throw std::invalid_argument("encode: symbol must be +1 or -1");
  }
  return index;
}

std::vector<Symbol> decode(std::size_t index, int nodes) {
  if (nodes < 1 || nodes > 63) throw std::invalid_argument("decode: bad size");
  if (nodes < 63 && (index >> nodes))
    throw std::invalid_argument("decode: index out of range");
  std::vector<Symbol> out(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i)
    out[static_cast<std::size_t>(i)] = (index >> i) & 1 ? 1 : -1;
  return out;
}

JointPmf product_pmf(const MarginalSet& marginals) {
  const int n = marginals.nodes();
  const std::size_t total = checked_size(n);
  std::vector<double> probs(total, 0.0);
  probs[0] = 1.0;
  std::size_t filled = 1;
  for (int i = 0; i < n; ++i) {
    const double pc = marginals.p_correct[static_cast<std::size_t>(i)];
    if (!(pc >= 0.0 && pc <= 1.0))
      throw std::invalid_argument("marginal outside [0, 1]");
    for (std::size_t k = filled; k-- > 0;) {
      const double base = probs[k];
      probs[k | filled] = base * pc;
      probs[k] = base * (1.0 - pc);
    }
    filled <<= 1;
  }
  return JointPmf(n, std::move(probs));
}

JointPmf mirror(const JointPmf& pmf) {
  const std::size_t mask = pmf.size() - 1;
  std::vector<double> out(pmf.size());
  for (std::size_t k = 0; k < pmf.size(); ++k) out[k ^ mask] = pmf[k];
  return JointPmf(pmf.nodes(), std::move(out));
}

JointPmf pjp_pmf(int nodes, int n_f) {
  const std::size_t total = checked_size(nodes);
  if (n_f < 0 || n_f > nodes)
    throw std::invalid_argument("n_f must lie in [0, n]");
  std::size_t qualifying = 0;
  for (std::size_t k = 0; k < total; ++k)
    if (std::popcount(k) >= n_f) ++qualifying;
  std::vector<double> probs(total, 0.0);
  const double mass = 1.0 / static_cast<double>(qualifying);
  for (std::size_t k = 0; k < total; ++k)
    if (std::popcount(k) >= n_f) probs[k] = mass;
  return JointPmf(nodes, std::move(probs));
}

int pjp_default_threshold(int nodes) { return (nodes + 2) / 2; }

int GroupContext::prev_nodes() const {
  if (incoming.empty()) throw std::invalid_argument("empty group context");
  return static_cast<int>(incoming.front().size());
}

JointPmf estimate_mcs(const GroupContext& group, const NodeDecisionFn& decide,
                      std::uint64_t samples, const StreamKey& streams,
                      int threads) {
  if (samples == 0)
    throw std::invalid_argument("estimate_mcs: samples must be >= 1");
  if (group.prev_pmf == nullptr)
    throw std::invalid_argument("estimate_mcs: previous pmf required");
  const int n = group.nodes();
  const int n_prev = group.prev_nodes();
  const JointPmf& prev = *group.prev_pmf;
  if (prev.nodes() != n_prev)
    throw std::invalid_argument("estimate_mcs: pmf size does not match fan-in");
  for (const auto& links : group.incoming)
    if (static_cast<int>(links.size()) != n_prev)
      throw std::invalid_argument("estimate_mcs: ragged group context");
  const std::size_t total = checked_size(n);

  std::vector<double> cdf(prev.size());
  std::partial_sum(prev.probs().begin(), prev.probs().end(), cdf.begin());
  cdf.back() = 1.0;

  const auto run = [&](std::uint64_t lo, std::uint64_t hi,
                       std::vector<std::uint64_t>& counts) {
    std::vector<Symbol> latent(static_cast<std::size_t>(n_prev));
    std::vector<Observation> received(static_cast<std::size_t>(n_prev));
    std::vector<Symbol> decisions(static_cast<std::size_t>(n));
    for (std::uint64_t m = lo; m < hi; ++m) {
      Rng rng = streams.at(m);
      const double u = rng.uniform();
      const std::size_t kappa_prev = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      for (int i = 0; i < n_prev; ++i)
        latent[static_cast<std::size_t>(i)] = (kappa_prev >> i) & 1 ? 1 : -1;
      for (int j = 0; j < n; ++j) {
        const auto& links = group.incoming[static_cast<std::size_t>(j)];
        for (int i = 0; i < n_prev; ++i)
          received[static_cast<std::size_t>(i)] =
              sample_observation(latent[static_cast<std::size_t>(i)],
                                 links[static_cast<std::size_t>(i)], rng);
        decisions[static_cast<std::size_t>(j)] = decide(j, received, links);
      }
      ++counts[encode(decisions)];
    }
  };

  std::vector<std::uint64_t> counts(total, 0);
  const int workers = std::max(
      1, std::min<int>(threads,
                       static_cast<int>(std::min<std::uint64_t>(samples, 256))));
  if (workers == 1) {
    run(0, samples, counts);
  } else {
    std::vector<std::vector<std::uint64_t>> parts(
        static_cast<std::size_t>(workers),
        std::vector<std::uint64_t>(total, 0));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = samples * static_cast<std::uint64_t>(w) /
                               static_cast<std::uint64_t>(workers);
      const std::uint64_t hi = samples * static_cast<std::uint64_t>(w + 1) /
                               static_cast<std::uint64_t>(workers);
      pool.emplace_back(run, lo, hi,
                        std::ref(parts[static_cast<std::size_t>(w)]));
    }
    for (auto& t : pool) t.join();
    for (const auto& part : parts)
      for (std::size_t k = 0; k < total; ++k) counts[k] += part[k];
  }

  std::vector<double> probs(total);
  for (std::size_t k = 0; k < total; ++k)
    probs[k] = static_cast<double>(counts[k]) / static_cast<double>(samples);
  return JointPmf(n, std::move(probs));
}

std::vector<double> transition_solve(std::span<const double> p_kappa,
                                     std::span<const double> per_node_pc) {
  const int n = static_cast<int>(per_node_pc.size());
  const std::size_t total = checked_size(n);
  if (p_kappa.size() != total)
    throw std::invalid_argument("transition_solve: vector length mismatch");
  std::vector<double> b(p_kappa.begin(), p_kappa.end());
  for (int i = 0; i < n; ++i) {
    const double pc = per_node_pc[static_cast<std::size_t>(i)];
    const double det = 2.0 * pc - 1.0;  // p_c - p_e
    if (std::abs(det) < 1e-12) throw UninformativeNodeError(i);
    const double pe = 1.0 - pc;
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t base = 0; base < total; ++base) {
      if (base & bit) continue;
      const double lo = b[base];
      const double hi = b[base | bit];
      b[base] = (pc * lo - pe * hi) / det;
      b[base | bit] = (pc * hi - pe * lo) / det;
    }
  }
  return b;
}

ProjectionResult project_simplex(std::span<const double> b) {
  const std::size_t m = b.size();
  if (m == 0) throw std::invalid_argument("project_simplex: empty input");
  const double sum = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("project_simplex: input must sum to one");

  std::vector<double> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double xi = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) xi = candidate;
  }

  ProjectionResult result;
  result.xi = xi;
  result.p_hat.resize(m);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = b[i] - xi;
    result.p_hat[i] = v > 0.0 ? v : 0.0;
    const double eps = b[i] - result.p_hat[i];
    norm_sq += eps * eps;
  }
  result.correction_norm = std::sqrt(norm_sq);
  return result;
}

JointPmf estimate_ps(std::span<const double> p_kappa_hat,
                     std::span<const double> per_node_pc) {
  const int n = static_cast<int>(per_node_pc.size());
  const std::vector<double> b = transition_solve(p_kappa_hat, per_node_pc);
  ProjectionResult projected = project_simplex(b);
  return JointPmf(n, std::move(projected.p_hat));
}

std::vector<double> compress_symmetric(const JointPmf& pmf) {
  const int n = pmf.nodes();
  std::vector<double> mass(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> combos(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const auto w = static_cast<std::size_t>(std::popcount(k));
    mass[w] += pmf[k];
    combos[w] += 1.0;
  }
  for (std::size_t w = 0; w < mass.size(); ++w) mass[w] /= combos[w];
  return mass;
}

JointPmf expand_symmetric(std::span<const double> weights, int nodes) {
  const std::size_t total = checked_size(nodes);
  if (weights.size() != static_cast<std::size_t>(nodes) + 1)
    throw std::invalid_argument("expand_symmetric: need n + 1 weights");
  std::vector<double> probs(total);
  for (std::size_t k = 0; k < total; ++k)
    probs[k] = weights[static_cast<std::size_t>(std::popcount(k))];
  return JointPmf(nodes, std::move(probs));
}

double quantize_probability(double p, int bits) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("probability outside [0, 1]");
  if (bits < 1) throw std::invalid_argument("bits must be >= 1");
  const double levels = static_cast<double>((std::uint64_t{1} << bits) - 1);
  return std::round(p * levels) / levels;
}

}  // namespace relaysim
