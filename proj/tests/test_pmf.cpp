#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "relaysim/channel.hpp"
#include "relaysim/detectors.hpp"
#include "relaysim/pmf.hpp"

using namespace relaysim;

namespace {

// Brute-force reference for the simplex projection: enumerate support sets,
// solve the equality-constrained least squares on each, keep the candidate
// satisfying all KKT conditions.
std::vector<double> project_by_active_sets(const std::vector<double>& b) {
  const std::size_t m = b.size();
  for (std::size_t support = 1; support < (std::size_t{1} << m); ++support) {
    int count = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if ((support >> i) & 1) {
        ++count;
        sum += b[i];
      }
    const double xi = (sum - 1.0) / count;
    bool feasible = true;
    for (std::size_t i = 0; i < m && feasible; ++i) {
      if ((support >> i) & 1)
        feasible = b[i] - xi >= -1e-12;        // primal feasibility on support
      else
        feasible = b[i] - xi <= 1e-12;         // dual feasibility off support
    }
    if (!feasible) continue;
    std::vector<double> p(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if ((support >> i) & 1) p[i] = std::max(0.0, b[i] - xi);
    return p;
  }
  REQUIRE(false);
  return {};
}

// Forward application of the Kronecker-factored transition matrix.
std::vector<double> transition_apply(const std::vector<double>& p_zeta,
                                     const std::vector<double>& pc) {
  const int n = static_cast<int>(pc.size());
  std::vector<double> out = p_zeta;
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t base = 0; base < out.size(); ++base) {
      if (base & bit) continue;
      const double lo = out[base];
      const double hi = out[base | bit];
      out[base] = pc[i] * lo + (1.0 - pc[i]) * hi;
      out[base | bit] = (1.0 - pc[i]) * lo + pc[i] * hi;
    }
  }
  return out;
}

MarginalSet marginals_of(const JointPmf& pmf) {
  MarginalSet m;
  m.p_correct.assign(static_cast<std::size_t>(pmf.nodes()), 0.0);
  for (std::size_t k = 0; k < pmf.size(); ++k)
    for (int i = 0; i < pmf.nodes(); ++i)
      if ((k >> i) & 1) m.p_correct[static_cast<std::size_t>(i)] += pmf[k];
  return m;
}

}  // namespace

TEST_CASE("encode examples and bijection") {
  const std::vector<Symbol> all_minus{-1, -1, -1};
  CHECK(encode(all_minus) == 0);
  const std::vector<Symbol> first_plus{1, -1, -1};
  CHECK(encode(first_plus) == 1);
  for (std::size_t k = 0; k < 16; ++k) CHECK(encode(decode(k, 4)) == k);
  const std::vector<Symbol> bad{1, 0};
  CHECK_THROWS_AS(encode(bad), std::invalid_argument);
}

TEST_CASE("product_pmf examples") {
  const JointPmf one = product_pmf(MarginalSet{{0.9}});
  CHECK(one[0] == doctest::Approx(0.1));
  CHECK(one[1] == doctest::Approx(0.9));

  const JointPmf two = product_pmf(MarginalSet{{0.9, 0.8}});
  CHECK(two[0] == doctest::Approx(0.02));
  CHECK(two[1] == doctest::Approx(0.18));
  CHECK(two[2] == doctest::Approx(0.08));
  CHECK(two[3] == doctest::Approx(0.72));

  const JointPmf sure = product_pmf(MarginalSet{{1.0, 1.0, 1.0}});
  CHECK(sure[7] == doctest::Approx(1.0));
}

TEST_CASE("mirror examples and involution") {
  const JointPmf point = JointPmf::point_mass(3, 7);
  CHECK(mirror(point)[0] == doctest::Approx(1.0));
  const JointPmf flat = JointPmf::uniform(3);
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(mirror(flat)[k] == doctest::Approx(flat[k]));

  Rng rng(4);
  std::vector<double> raw(32);
  double sum = 0.0;
  for (double& v : raw) sum += (v = rng.uniform());
  for (double& v : raw) v /= sum;
  const JointPmf p(5, raw);
  const JointPmf back = mirror(mirror(p));
  for (std::size_t k = 0; k < p.size(); ++k)
    CHECK(back[k] == doctest::Approx(p[k]).epsilon(1e-14));
}

TEST_CASE("pjp_pmf examples") {
  const JointPmf strict = pjp_pmf(3, 3);
  CHECK(strict[7] == doctest::Approx(1.0));
  const JointPmf majority = pjp_pmf(3, 2);
  for (std::size_t k : {3u, 5u, 6u, 7u}) CHECK(majority[k] == doctest::Approx(0.25));
  for (std::size_t k : {0u, 1u, 2u, 4u}) CHECK(majority[k] == 0.0);
  const JointPmf open = pjp_pmf(2, 0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(open[k] == doctest::Approx(0.25));
  CHECK(pjp_default_threshold(10) == 6);
  CHECK(pjp_default_threshold(5) == 3);
}

TEST_CASE("transition_solve examples") {
  // round trip through the forward map
  const std::vector<double> pc{0.9, 0.8, 0.7};
  std::vector<double> p(8);
  Rng rng(5);
  double sum = 0.0;
  for (double& v : p) sum += (v = rng.uniform());
  for (double& v : p) v /= sum;
  const std::vector<double> forward = transition_apply(p, pc);
  const std::vector<double> back = transition_solve(forward, pc);
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(back[k] == doctest::Approx(p[k]).epsilon(1e-12));

  const std::vector<double> kappa{0.14, 0.86};
  const std::vector<double> single_pc{0.9};
  const std::vector<double> b = transition_solve(kappa, single_pc);
  CHECK(b[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(0.95).epsilon(1e-12));

  const std::vector<double> singular{0.5};
  CHECK_THROWS_AS(transition_solve(kappa, singular), UninformativeNodeError);
}

TEST_CASE("transition_solve preserves total mass and round-trips randomly") {
  Rng rng(6);
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> pc(static_cast<std::size_t>(n));
    for (double& v : pc) v = 0.55 + 0.44 * rng.uniform();
    std::vector<double> p(std::size_t{1} << n);
    double sum = 0.0;
    for (double& v : p) sum += (v = rng.uniform());
    for (double& v : p) v /= sum;
    const std::vector<double> round = transition_solve(transition_apply(p, pc), pc);
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(round[k] == doctest::Approx(p[k]).epsilon(1e-9));
      total += round[k];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("project_simplex examples") {
  {
    const std::vector<double> b{0.6, 0.5, -0.1};
    const ProjectionResult r = project_simplex(b);
    CHECK(r.p_hat[0] == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(r.p_hat[1] == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(r.p_hat[2] == 0.0);
    CHECK(r.xi == doctest::Approx(0.05).epsilon(1e-12));
  }
  {
    const std::vector<double> b{1.2, -0.2};
    const ProjectionResult r = project_simplex(b);
    CHECK(r.p_hat[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.p_hat[1] == 0.0);
    CHECK(r.xi == doctest::Approx(0.2).epsilon(1e-12));
  }
  {
    const std::vector<double> b{0.25, 0.35, 0.4};
    const ProjectionResult r = project_simplex(b);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(r.p_hat[i] == doctest::Approx(b[i]).epsilon(1e-14));
    CHECK(r.xi == doctest::Approx(0.0));
    CHECK(r.correction_norm == doctest::Approx(0.0));
  }
  const std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(project_simplex(bad), std::invalid_argument);
}

TEST_CASE("project_simplex agrees with the active-set reference") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform() * 5);
    std::vector<double> b(static_cast<std::size_t>(m));
    for (double& v : b) v = 2.0 * rng.uniform() - 0.8;
    const double sum = std::accumulate(b.begin(), b.end(), 0.0);
    for (double& v : b) v += (1.0 - sum) / m;
    const ProjectionResult fast = project_simplex(b);
    const std::vector<double> reference = project_by_active_sets(b);
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(fast.p_hat[i] == doctest::Approx(reference[i]).epsilon(1e-10));
      CHECK((fast.p_hat[i] == 0.0) == (reference[i] == 0.0));
    }
  }
}

TEST_CASE("estimate_ps recovers a known pmf from synthetic pilots") {
  // exact limit: feeding the forward-mapped pmf recovers it exactly
  const std::vector<double> pc{0.9, 0.9};
  const std::vector<double> truth{0.0, 0.1, 0.1, 0.8};
  const std::vector<double> ideal_kappa = transition_apply(truth, pc);
  const JointPmf exact = estimate_ps(ideal_kappa, pc);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(exact[k] == doctest::Approx(truth[k]).epsilon(1e-9));

  // finite pilots
  Rng rng(8);
  const int pilots = 1000000;
  std::vector<double> histogram(4, 0.0);
  for (int m = 0; m < pilots; ++m) {
    const double u = rng.uniform();
    std::size_t zeta = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      acc += truth[k];
      if (u < acc) {
        zeta = k;
        break;
      }
    }
    std::size_t kappa = 0;
    for (int i = 0; i < 2; ++i) {
      const bool agree = rng.uniform() < pc[static_cast<std::size_t>(i)];
      const bool bit = (zeta >> i) & 1;
      if (agree == bit) kappa |= std::size_t{1} << i;
    }
    histogram[kappa] += 1.0 / pilots;
  }
  const JointPmf recovered = estimate_ps(histogram, pc);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(recovered[k] - truth[k]) < 0.01);

  // adversarial histogram still projects to a valid pmf
  const std::vector<double> adversarial{0.9, 0.05, 0.05, 0.0};
  const JointPmf projected = estimate_ps(adversarial, pc);
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(projected[k] >= 0.0);
    total += projected[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("estimate_mcs single relay matches the closed form") {
  const JointPmf source = JointPmf::point_mass(1, 1);
  GroupContext ctx;
  ctx.incoming = {{ChannelSpec::known_stats(2.0, 1.0)}};
  ctx.prev_pmf = &source;
  const NodeDecisionFn sign_rule = [](int, std::span<const Observation> y,
                                      std::span<const ChannelSpec>) {
    return detect_first_group(y[0]);
  };
  const JointPmf est = estimate_mcs(ctx, sign_rule, 100000, {101, 1}, 2);
  const double expected = 1.0 - 0.14644660940672627;
  const double se = std::sqrt(expected * (1.0 - expected) / 100000.0);
  CHECK(std::abs(est[1] - expected) < 3.0 * se);
}

TEST_CASE("estimate_mcs copies the previous pmf through noiseless links") {
  const JointPmf prev(2, {0.1, 0.2, 0.3, 0.4});
  GroupContext ctx;
  const ChannelSpec clean = ChannelSpec::known_csi(1.0, 1e-12);
  ctx.incoming = {{clean, clean}, {clean, clean}};
  ctx.prev_pmf = &prev;
  const NodeDecisionFn copy_own = [](int node, std::span<const Observation> y,
                                     std::span<const ChannelSpec>) {
    return detect_first_group(y[static_cast<std::size_t>(node)]);
  };
  const JointPmf est = estimate_mcs(ctx, copy_own, 200000, {102, 1}, 2);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(est[k] - prev[k]) < 0.005);
}

namespace {

// Direct mixture statistic of the MAP rule, no log tricks; used to bisect
// the decision boundary in y2 for the quadrature oracle.
double map_statistic(const JointPmf& prev, double y1, double y2,
                     const std::vector<double>& h, double sigma_sq) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Symbol x1 = k & 1 ? 1 : -1;
    const Symbol x2 = k & 2 ? 1 : -1;
    const double f = likelihood_csi(y1, h[0], x1, sigma_sq) *
                     likelihood_csi(y2, h[1], x2, sigma_sq);
    num += prev[k] * f;
    den += prev[3 - k] * f;
  }
  return num - den;
}

double node_plus_prob_oracle(const JointPmf& prev, std::size_t u,
                             const std::vector<double>& h, double sigma_sq) {
  const double sigma = std::sqrt(sigma_sq);
  const double mean1 = h[0] * ((u & 1) ? 1.0 : -1.0);
  const double mean2 = h[1] * ((u & 2) ? 1.0 : -1.0);
  // Simpson over y1, exact Gaussian tail over y2 past the bisected boundary.
  const int steps = 800;
  const double lo = mean1 - 9.0 * sigma, hi = mean1 + 9.0 * sigma;
  const double dy = (hi - lo) / steps;
  double integral = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const double y1 = lo + s * dy;
    // bracket wide enough for any boundary with non-underflowing densities
    double lo2 = mean2 - 12.0 * sigma, hi2 = mean2 + 12.0 * sigma;
    const double s_lo = map_statistic(prev, y1, lo2, h, sigma_sq);
    const double s_hi = map_statistic(prev, y1, hi2, h, sigma_sq);
    double region;
    if (s_lo > 0.0 && s_hi > 0.0) {
      region = 1.0;
    } else if (s_lo <= 0.0 && s_hi <= 0.0) {
      region = 0.0;
    } else {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo2 + hi2);
        if ((map_statistic(prev, y1, mid, h, sigma_sq) > 0.0) == (s_hi > 0.0))
          hi2 = mid;
        else
          lo2 = mid;
      }
      const double boundary = 0.5 * (lo2 + hi2);
      const double tail = q_function((boundary - mean2) / sigma);
      region = s_hi > 0.0 ? tail : 1.0 - tail;
    }
    const double weight = (s == 0 || s == steps) ? 1.0 : (s % 2 ? 4.0 : 2.0);
    const double pdf = std::exp(-0.5 * (y1 - mean1) * (y1 - mean1) / sigma_sq) /
                       (sigma * std::sqrt(2.0 * 3.14159265358979323846));
    integral += weight * pdf * region;
  }
  return integral * dy / 3.0;
}

}  // namespace

TEST_CASE("estimate_mcs matches the two-node quadrature oracle") {
  const JointPmf prev(2, {0.1, 0.2, 0.3, 0.4});
  const double sigma_sq = 1.0;
  const std::vector<double> h_node0{1.0, 0.6};
  const std::vector<double> h_node1{0.8, 1.3};
  GroupContext ctx;
  ctx.incoming = {{ChannelSpec::known_csi(h_node0[0], sigma_sq),
                   ChannelSpec::known_csi(h_node0[1], sigma_sq)},
                  {ChannelSpec::known_csi(h_node1[0], sigma_sq),
                   ChannelSpec::known_csi(h_node1[1], sigma_sq)}};
  ctx.prev_pmf = &prev;
  const NodeDecisionFn map_rule = [&prev](int, std::span<const Observation> y,
                                          std::span<const ChannelSpec> links) {
    DecisionContext dctx{y, links, &prev, nullptr};
    return map_detect(dctx);
  };
  const std::uint64_t samples = 1000000;
  const JointPmf est = estimate_mcs(ctx, map_rule, samples, {103, 1}, 2);

  // oracle: mix the per-node +1 probabilities over the latent pmf
  std::vector<double> expected(4, 0.0);
  for (std::size_t u = 0; u < 4; ++u) {
    const double p0 = node_plus_prob_oracle(prev, u, h_node0, sigma_sq);
    const double p1 = node_plus_prob_oracle(prev, u, h_node1, sigma_sq);
    for (std::size_t v = 0; v < 4; ++v) {
      const double q0 = (v & 1) ? p0 : 1.0 - p0;
      const double q1 = (v & 2) ? p1 : 1.0 - p1;
      expected[v] += prev[u] * q0 * q1;
    }
  }
  for (std::size_t v = 0; v < 4; ++v) {
    const double se =
        std::sqrt(std::max(expected[v] * (1.0 - expected[v]), 1e-9) / samples);
    CHECK_MESSAGE(std::abs(est[v] - expected[v]) < 3.0 * se, "entry ", v,
                  " est=", est[v], " expected=", expected[v]);
  }
}

TEST_CASE("estimated joints are measurably non-product") {
  // the shared latent makes decisions of a group correlated
  const JointPmf prev = product_pmf(MarginalSet{{0.7887, 0.7887}});
  const ChannelSpec noisy = ChannelSpec::known_stats(1.0, 1.0);
  GroupContext ctx;
  ctx.incoming = {{noisy, noisy}, {noisy, noisy}};
  ctx.prev_pmf = &prev;
  const NodeDecisionFn map_rule = [&prev](int, std::span<const Observation> y,
                                          std::span<const ChannelSpec> links) {
    DecisionContext dctx{y, links, &prev, nullptr};
    return map_detect(dctx);
  };
  const JointPmf est = estimate_mcs(ctx, map_rule, 400000, {104, 1}, 2);
  const JointPmf independent = product_pmf(marginals_of(est));
  CHECK(std::abs(est[0] - independent[0]) > 0.02);
}

TEST_CASE("mirrored conditioning gives the mirrored estimate") {
  // estimate conditioned on x = -1 by feeding the mirrored latent pmf
  const JointPmf prev = product_pmf(MarginalSet{{0.85, 0.75}});
  const JointPmf prev_minus = mirror(prev);
  for (const bool csi : {false, true}) {
    const ChannelSpec spec = csi ? ChannelSpec::known_csi(1.2, 1.0)
                                 : ChannelSpec::known_stats(2.0, 1.0);
    GroupContext ctx;
    ctx.incoming = {{spec, spec}, {spec, spec}};
    // the nodes keep their x = +1 belief; only the latent truth is flipped
    const NodeDecisionFn map_rule = [&prev](int, std::span<const Observation> y,
                                            std::span<const ChannelSpec> links) {
      DecisionContext dctx{y, links, &prev, nullptr};
      return map_detect(dctx);
    };
    const std::uint64_t samples = 400000;
    ctx.prev_pmf = &prev;
    const JointPmf plus = estimate_mcs(ctx, map_rule, samples, {105, 1}, 2);
    ctx.prev_pmf = &prev_minus;
    const JointPmf minus = estimate_mcs(ctx, map_rule, samples, {106, 1}, 2);
    const JointPmf mirrored = mirror(plus);
    for (std::size_t k = 0; k < 4; ++k) {
      const double se = std::sqrt(
          std::max(mirrored[k] * (1.0 - mirrored[k]), 1e-9) / samples);
      CHECK_MESSAGE(std::abs(minus[k] - mirrored[k]) < 3.0 * std::sqrt(2.0) * se,
                    "csi=", csi, " entry ", k);
    }
  }
}

TEST_CASE("symmetric compression round-trips") {
  const JointPmf flat = JointPmf::uniform(3);
  const std::vector<double> weights = compress_symmetric(flat);
  for (double w : weights) CHECK(w == doctest::Approx(0.125));

  const JointPmf point = JointPmf::point_mass(4, 15);
  const std::vector<double> pw = compress_symmetric(point);
  CHECK(pw.back() == doctest::Approx(1.0));
  for (std::size_t i = 0; i + 1 < pw.size(); ++i) CHECK(pw[i] == 0.0);

  // exchangeable pmf round trip
  std::vector<double> probs(16);
  const std::vector<double> by_weight{0.05, 0.1, 0.2, 0.3, 0.4};
  std::vector<double> combos{1, 4, 6, 4, 1};
  double total = 0.0;
  for (std::size_t k = 0; k < 16; ++k)
    total += probs[k] = by_weight[static_cast<std::size_t>(std::popcount(k))];
  for (double& v : probs) v /= total;
  const JointPmf sym(4, probs);
  const JointPmf round = expand_symmetric(compress_symmetric(sym), 4);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(round[k] == doctest::Approx(sym[k]).epsilon(1e-12));
}

TEST_CASE("quantize_probability examples and properties") {
  CHECK(quantize_probability(0.07, 4) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
  CHECK(quantize_probability(0.49, 1) == 0.0);
  CHECK(quantize_probability(0.5, 1) == 1.0);  // ties round up
  double prev_out = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i / 1000.0;
    const double q = quantize_probability(p, 4);
    CHECK(quantize_probability(q, 4) == doctest::Approx(q).epsilon(1e-14));
    if (i > 0) CHECK(q >= prev_out);  // monotone
    prev_out = q;
  }
}

TEST_CASE("joint pmf invariants are enforced") {
  CHECK_THROWS_AS(JointPmf(2, {0.5, 0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(JointPmf(2, {-0.1, 0.4, 0.4, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(JointPmf(2, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(JointPmf(25, std::vector<double>(8, 0.125)),
                  std::invalid_argument);
  const JointPmf normalized(1, {0.5000001, 0.5});
  CHECK(normalized[0] + normalized[1] == doctest::Approx(1.0).epsilon(1e-15));
}
