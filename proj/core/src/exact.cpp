#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "exact_internal.hpp"
#include "relaysim/numeric.hpp"

namespace relaysim::detail {

namespace {

constexpr double kQuadTol = 1e-9;
constexpr double kRange = 12.0;  // integration half-width in noise sigmas
constexpr double kInf = std::numeric_limits<double>::infinity();

double phi(double z) {
  return 0.3989422804014326779399460599344 * std::exp(-0.5 * z * z);
}

// One independence-rule summand with its inversion: the term is monotone
// increasing in y for p_correct > 1/2 and saturates at +-log(p/(1-p)).
struct IdTerm {
  double h = 0.0;
  double sigma_sq = 1.0;
  double pc = 1.0;

  bool degenerate() const { return h == 0.0 || pc == 0.5; }

  double value(double y) const {
    return id_log_ratio_term(llr_csi(y, h, sigma_sq), pc);
  }

  // Saturation bound of |value|; the term is decreasing in y for pc < 1/2.
  double sup() const {
    if (degenerate()) return 0.0;
    if (pc == 1.0 || pc == 0.0) return kInf;
    return std::abs(std::log(pc / (1.0 - pc)));
  }

  // The y with value(y) = t; requires |t| < sup() and no degeneracy.
  double invert(double t) const {
    double log_ratio;
    if (pc == 1.0) {
      log_ratio = t;
    } else {
      const double qc = 1.0 - pc;
      const double et = std::exp(t);
      log_ratio = std::log((et * pc - qc) / (pc - et * qc));
    }
    return sigma_sq * log_ratio / (2.0 * h);
  }
};

// Decision rule of one node with side information already restricted to its
// incoming links, in incoming order.
struct NodeRule {
  DetectorKind kind = DetectorKind::mrc;
  const JointPmf* pmf = nullptr;   // full_map / pjp
  std::vector<double> p_correct;   // id, one entry per incoming link
};

double plus_prob_fan1(const NodeRule& rule, const ChannelSpec& link,
                      Symbol u) {
  const double h = link.gain();
  const double sigma = std::sqrt(link.noise_variance());
  const double mean = h * static_cast<double>(u);
  double pc = 1.0;
  switch (rule.kind) {
    case DetectorKind::first_group_sign:
    case DetectorKind::mrc:
      if (h == 0.0) return 1.0;  // weightless sum, tie everywhere
      return normal_cdf(mean / sigma);
    case DetectorKind::id:
      pc = rule.p_correct[0];
      break;
    case DetectorKind::full_map:
    case DetectorKind::pjp:
      pc = (*rule.pmf)[1];  // P(x_prev = +1 | x = +1)
      break;
  }
  if (h == 0.0 || pc == 0.5) return 1.0;  // term vanishes, tie decided +1
  if (pc > 0.5) return normal_cdf(mean / sigma);
  return normal_cdf(-mean / sigma);
}

double plus_prob_mrc2(std::span<const ChannelSpec> links,
                      std::span<const Symbol> u) {
  const double h1 = links[0].gain();
  const double h2 = links[1].gain();
  const double s2 = links[0].noise_variance();
  const double wsq = h1 * h1 + h2 * h2;
  if (wsq == 0.0) return 1.0;
  const double mean = h1 * h1 * static_cast<double>(u[0]) +
                      h2 * h2 * static_cast<double>(u[1]);
  return normal_cdf(mean / std::sqrt(s2 * wsq));
}

double plus_prob_id2(const NodeRule& rule, std::span<const ChannelSpec> links,
                     std::span<const Symbol> u) {
  const IdTerm t1{links[0].gain(), links[0].noise_variance(),
                  rule.p_correct[0]};
  const IdTerm t2{links[1].gain(), links[1].noise_variance(),
                  rule.p_correct[1]};
  const double sigma1 = std::sqrt(links[0].noise_variance());
  const double sigma2 = std::sqrt(links[1].noise_variance());
  const double mean1 = t1.h * static_cast<double>(u[0]);
  const double mean2 = t2.h * static_cast<double>(u[1]);

  if (t1.degenerate() && t2.degenerate()) return 1.0;
  if (t1.degenerate()) {
    const double y2 = t2.invert(0.0);
    return t2.pc > 0.5 ? normal_cdf((mean2 - y2) / sigma2)
                       : normal_cdf((y2 - mean2) / sigma2);
  }
  if (t2.degenerate()) {
    const double y1 = t1.invert(0.0);
    return t1.pc > 0.5 ? normal_cdf((mean1 - y1) / sigma1)
                       : normal_cdf((y1 - mean1) / sigma1);
  }

  const double t2sup = t2.sup();
  const auto region = [&](double y1) {
    const double t = -t1.value(y1);
    if (t >= t2sup) return 0.0;
    if (t <= -t2sup) return 1.0;
    const double y2 = t2.invert(t);
    return t2.pc > 0.5 ? normal_cdf((mean2 - y2) / sigma2)
                       : normal_cdf((y2 - mean2) / sigma2);
  };
  const auto integrand = [&](double s) {
    return phi(s) * region(mean1 + sigma1 * s);
  };
  return integrate(integrand, -kRange, kRange, kQuadTol);
}

double plus_prob_map2(const NodeRule& rule, std::span<const ChannelSpec> links,
                      std::span<const Symbol> u) {
  const JointPmf& pmf = *rule.pmf;
  const double h1 = links[0].gain();
  const double h2 = links[1].gain();
  const double s1 = std::sqrt(links[0].noise_variance());
  const double s2 = std::sqrt(links[1].noise_variance());
  const double mean1 = h1 * static_cast<double>(u[0]);
  const double mean2 = h2 * static_cast<double>(u[1]);

  // num - den = (A - C) f2(y2|+1) + (B - D) f2(y2|-1) given y1; the ratio
  // f2(+1)/f2(-1) is monotone in y2, so the +1 region is a half-line.
  const auto region = [&](double y1) {
    const double f1p = likelihood_csi(y1, h1, 1, links[0].noise_variance());
    const double f1m = likelihood_csi(y1, h1, -1, links[0].noise_variance());
    const double a = pmf[3] * f1p + pmf[2] * f1m;
    const double b = pmf[1] * f1p + pmf[0] * f1m;
    const double cc = pmf[0] * f1p + pmf[1] * f1m;
    const double dd = pmf[2] * f1p + pmf[3] * f1m;
    const double ac = a - cc;
    const double db = dd - b;
    if (h2 == 0.0) return (a + b) - (cc + dd) >= 0.0 ? 1.0 : 0.0;
    if (ac > 0.0) {
      if (db <= 0.0) return 1.0;
      const double y2 =
          links[1].noise_variance() * std::log(db / ac) / (2.0 * h2);
      return normal_cdf((mean2 - y2) / s2);
    }
    if (ac < 0.0) {
      if (db >= 0.0) return 0.0;
      const double y2 =
          links[1].noise_variance() * std::log(db / ac) / (2.0 * h2);
      return normal_cdf((y2 - mean2) / s2);
    }
    return b - dd >= 0.0 ? 1.0 : 0.0;
  };
  const auto integrand = [&](double s) {
    return phi(s) * region(mean1 + s1 * s);
  };
  return integrate(integrand, -kRange, kRange, kQuadTol);
}

double node_plus_prob(const NodeRule& rule, std::span<const ChannelSpec> links,
                      std::span<const Symbol> u) {
  if (links.size() == 1) return plus_prob_fan1(rule, links[0], u[0]);
  if (links.size() != 2)
    throw std::invalid_argument("exact path handles fan-in <= 2 only");
  switch (rule.kind) {
    case DetectorKind::mrc:
      return plus_prob_mrc2(links, u);
    case DetectorKind::id:
      return plus_prob_id2(rule, links, u);
    case DetectorKind::full_map:
    case DetectorKind::pjp:
      return plus_prob_map2(rule, links, u);
    case DetectorKind::first_group_sign:
      break;
  }
  throw std::invalid_argument("unsupported rule in exact path");
}

// Rule of node `node` in `group`, side information taken from the pipeline
// entry about group-1 and restricted to the node's parents.
NodeRule rule_for_node(DetectorKind kind, const PmfPipeline& pipe,
                       const NetworkTopology& topo, int group, int node) {
  NodeRule rule;
  rule.kind = kind;
  if (kind == DetectorKind::id) {
    const MarginalSet& m = pipe.marginals[static_cast<std::size_t>(group - 2)];
    for (const auto& link : topo.incoming_links(group, node))
      rule.p_correct.push_back(
          m.p_correct[static_cast<std::size_t>(link.from)]);
  } else if (kind == DetectorKind::full_map || kind == DetectorKind::pjp) {
    rule.pmf = &pipe.joints[static_cast<std::size_t>(group - 2)];
  }
  return rule;
}

std::vector<double> first_group_dist(const NetworkTopology& topo) {
  const int n = topo.group_size(1);
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> p_plus(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const ChannelSpec& link = topo.incoming_channels(1, j)[0];
    p_plus[static_cast<std::size_t>(j)] =
        normal_cdf(link.gain() / std::sqrt(link.noise_variance()));
  }
  std::vector<double> dist(states, 0.0);
  for (std::size_t v = 0; v < states; ++v) {
    double w = 1.0;
    for (int j = 0; j < n; ++j)
      w *= (v >> j) & 1 ? p_plus[static_cast<std::size_t>(j)]
                        : 1.0 - p_plus[static_cast<std::size_t>(j)];
    dist[v] = w;
  }
  return dist;
}

// Joint distribution of a group's decisions given the previous one: the
// nodes see independent channels, so the conditional factorizes over nodes.
std::vector<double> advance_dist(const SimConfig& c,
                                 const NetworkTopology& topo, int group,
                                 const PmfPipeline& pipe,
                                 const std::vector<double>& prev_dist) {
  const int n = topo.group_size(group);
  const int n_prev = topo.group_size(group - 1);
  const std::size_t states = std::size_t{1} << n;
  const std::size_t prev_states = std::size_t{1} << n_prev;
  const DetectorKind kind =
      c.detector == DetectorKind::first_group_sign ? DetectorKind::mrc
                                                   : c.detector;
  std::vector<NodeRule> rules;
  rules.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    rules.push_back(rule_for_node(kind, pipe, topo, group, j));

  std::vector<double> dist(states, 0.0);
  std::vector<Symbol> u(static_cast<std::size_t>(n_prev));
  std::vector<Symbol> u_node;
  std::vector<double> p_plus(static_cast<std::size_t>(n));
  for (std::size_t pk = 0; pk < prev_states; ++pk) {
    if (prev_dist[pk] == 0.0) continue;
    for (int i = 0; i < n_prev; ++i)
      u[static_cast<std::size_t>(i)] = (pk >> i) & 1 ? 1 : -1;
    for (int j = 0; j < n; ++j) {
      const auto links = topo.incoming_channels(group, j);
      const auto in = topo.incoming_links(group, j);
      u_node.resize(links.size());
      for (std::size_t i = 0; i < links.size(); ++i)
        u_node[i] = u[static_cast<std::size_t>(in[i].from)];
      p_plus[static_cast<std::size_t>(j)] =
          node_plus_prob(rules[static_cast<std::size_t>(j)], links, u_node);
    }
    for (std::size_t v = 0; v < states; ++v) {
      double w = prev_dist[pk];
      for (int j = 0; j < n; ++j)
        w *= (v >> j) & 1 ? p_plus[static_cast<std::size_t>(j)]
                          : 1.0 - p_plus[static_cast<std::size_t>(j)];
      dist[v] += w;
    }
  }
  return dist;
}

// Independence-model belief about one node: parents flip independently
// against the exchanged marginals instead of following the true joint.
double belief_plus_prob(const NodeRule& rule,
                        std::span<const ChannelSpec> links,
                        std::span<const double> parent_pc) {
  const std::size_t fan = links.size();
  const std::size_t states = std::size_t{1} << fan;
  std::vector<Symbol> u(fan);
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    double w = 1.0;
    for (std::size_t i = 0; i < fan; ++i) {
      const bool correct = (s >> i) & 1;
      u[i] = correct ? 1 : -1;
      w *= correct ? parent_pc[i] : 1.0 - parent_pc[i];
    }
    if (w == 0.0) continue;
    total += w * node_plus_prob(rule, links, u);
  }
  return total;
}

}  // namespace

bool enumerable_csi(const SimConfig& c) {
  return c.mode == FadingMode::known_csi && c.nodes_per_group <= 2;
}

PmfPipeline build_pipeline_exact(const SimConfig& c,
                                 const NetworkTopology& topo) {
  PmfPipeline pipe;
  const int K = topo.hop_count();
  if (c.scheme == PmfSchemeKind::id_analytic ||
      c.scheme == PmfSchemeKind::id_quantized) {
    pipe.computed.reserve(static_cast<std::size_t>(K));
    pipe.marginals.reserve(static_cast<std::size_t>(K));
    MarginalSet first;
    for (int j = 0; j < topo.group_size(1); ++j) {
      const ChannelSpec& link = topo.incoming_channels(1, j)[0];
      first.p_correct.push_back(
          normal_cdf(link.gain() / std::sqrt(link.noise_variance())));
    }
    pipe.computed.push_back(first);
    if (c.scheme == PmfSchemeKind::id_quantized)
      for (double& p : first.p_correct)
        p = quantize_probability(p, c.quant_bits);
    pipe.marginals.push_back(std::move(first));
    for (int g = 2; g <= K; ++g) {
      MarginalSet m;
      for (int j = 0; j < topo.group_size(g); ++j) {
        const NodeRule rule =
            rule_for_node(DetectorKind::id, pipe, topo, g, j);
        const auto links = topo.incoming_channels(g, j);
        m.p_correct.push_back(belief_plus_prob(rule, links, rule.p_correct));
      }
      pipe.computed.push_back(m);
      if (c.scheme == PmfSchemeKind::id_quantized)
        for (double& p : m.p_correct) p = quantize_probability(p, c.quant_bits);
      pipe.marginals.push_back(std::move(m));
    }
    return pipe;
  }
  if (c.scheme == PmfSchemeKind::mcs) {
    pipe.joints.reserve(static_cast<std::size_t>(K));
    std::vector<double> dist = first_group_dist(topo);
    pipe.joints.emplace_back(topo.group_size(1), dist);
    for (int g = 2; g <= K; ++g) {
      dist = advance_dist(c, topo, g, pipe, dist);
      pipe.joints.emplace_back(topo.group_size(g), dist);
    }
    return pipe;
  }
  throw std::invalid_argument("exact pipeline supports id and mcs schemes");
}

double exact_ber_impl(const SimConfig& c, const NetworkTopology& topo,
                      const PmfPipeline& pipe) {
  const int K = topo.hop_count();
  if (c.detector == DetectorKind::first_group_sign) {
    const ChannelSpec& link = topo.incoming_channels(1, 0)[0];
    return q_function(link.gain() / std::sqrt(link.noise_variance()));
  }

  std::vector<double> dist = first_group_dist(topo);
  for (int g = 2; g <= K; ++g) dist = advance_dist(c, topo, g, pipe, dist);

  const NodeRule dest = rule_for_node(c.detector, pipe, topo, K + 1, 0);
  const int n_prev = topo.group_size(K);
  const auto links = topo.incoming_channels(K + 1, 0);
  const auto in = topo.incoming_links(K + 1, 0);
  double ber = 0.0;
  std::vector<Symbol> u(static_cast<std::size_t>(n_prev));
  std::vector<Symbol> u_node(links.size());
  for (std::size_t pk = 0; pk < dist.size(); ++pk) {
    if (dist[pk] == 0.0) continue;
    for (int i = 0; i < n_prev; ++i)
      u[static_cast<std::size_t>(i)] = (pk >> i) & 1 ? 1 : -1;
    for (std::size_t i = 0; i < links.size(); ++i)
      u_node[i] = u[static_cast<std::size_t>(in[i].from)];
    ber += dist[pk] * (1.0 - node_plus_prob(dest, links, u_node));
  }
  return ber;
}

}  // namespace relaysim::detail
