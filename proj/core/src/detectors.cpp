#include "relaysim/detectors.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "relaysim/numeric.hpp"

namespace relaysim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_links(const DecisionContext& ctx) {
  if (ctx.received.size() != ctx.links.size())
    throw std::invalid_argument("observation/link count mismatch");
  if (ctx.received.empty())
    throw std::invalid_argument("decision context has no links");
}

// Exact evaluation of both posterior sides in the log domain with per-side
// max subtraction. Only reached when the scaled linear pass lost every term
// of one side to underflow.
Symbol map_detect_log_domain(const JointPmf& pmf,
                             std::span<const double> llrs) {
  const std::size_t total = pmf.size();
  const std::size_t mask = total - 1;
  const int n = pmf.nodes();
  thread_local std::vector<double> exponent;
  exponent.assign(total, 0.0);
  for (int i = 0; i < n; ++i) {
    const double l = llrs[static_cast<std::size_t>(i)];
    const double on = l < 0.0 ? l : 0.0;
    const double off = l < 0.0 ? 0.0 : -l;
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t base = 0; base < total; ++base) {
      if (base & bit) continue;
      exponent[base] += off;
      exponent[base | bit] += on;
    }
  }
  double num_max = kNegInf, den_max = kNegInf;
  for (std::size_t k = 0; k < total; ++k) {
    if (pmf[k] > 0.0) {
      const double v = std::log(pmf[k]) + exponent[k];
      if (v > num_max) num_max = v;
      const double w = std::log(pmf[k]) + exponent[k ^ mask];
      if (w > den_max) den_max = w;
    }
  }
  if (num_max == kNegInf || den_max == kNegInf) return 1;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    if (pmf[k] <= 0.0) continue;
    const double lp = std::log(pmf[k]);
    num += std::exp(lp + exponent[k] - num_max);
    den += std::exp(lp + exponent[k ^ mask] - den_max);
  }
  return sign_of(num_max + std::log(num) - (den_max + std::log(den)));
}

}  // namespace

Symbol map_detect(const DecisionContext& ctx) {
  require_links(ctx);
  if (ctx.prev_pmf == nullptr)
    throw std::invalid_argument("map_detect: previous-group pmf required");
  const JointPmf& pmf = *ctx.prev_pmf;
  const int n = pmf.nodes();
  if (static_cast<std::size_t>(n) != ctx.links.size())
    throw std::invalid_argument("map_detect: pmf size does not match fan-in");

  thread_local std::vector<double> llrs;
  llrs.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    llrs[static_cast<std::size_t>(i)] =
        ctx.links[static_cast<std::size_t>(i)].llr(
            ctx.received[static_cast<std::size_t>(i)]);

  // Mixture term for outcome kappa is P(kappa) * prod_i f(y_i | x_i(kappa)).
  // Dividing each link's likelihood pair by its larger element subtracts the
  // global maximum exponent, so the dominant product is exactly 1 and the
  // table never overflows.
  const std::size_t total = pmf.size();
  const std::size_t mask = total - 1;
  thread_local std::vector<double> table;
  table.assign(total, 0.0);
  table[0] = 1.0;
  std::size_t filled = 1;
  for (int i = 0; i < n; ++i) {
    const double l = llrs[static_cast<std::size_t>(i)];
    const double on = l < 0.0 ? std::exp(l) : 1.0;
    const double off = l < 0.0 ? 1.0 : std::exp(-l);
    for (std::size_t k = filled; k-- > 0;) {
      const double base = table[k];
      table[k | filled] = base * on;
      table[k] = base * off;
    }
    filled <<= 1;
  }

  // Summing both sides against table[k] in the same order makes the
  // complement symmetry exact in floating point (uniform pmf ties at +1).
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    num += pmf[k] * table[k];
    den += pmf[k ^ mask] * table[k];
  }
  if (num > den) return 1;
  if (den > num) return -1;
  if (num > 0.0) return 1;  // exact tie
  return map_detect_log_domain(pmf, llrs);
}

double id_log_ratio_term(double llr, double p_correct) {
  if (!(p_correct >= 0.0 && p_correct <= 1.0))
    throw std::invalid_argument("marginal outside [0, 1]");
  if (p_correct == 1.0) return llr;
  if (p_correct == 0.0) return -llr;
  const double lp = std::log(p_correct);
  const double lq = std::log1p(-p_correct);
  return log_sum_exp2(llr + lp, lq) - log_sum_exp2(lp, llr + lq);
}

Symbol id_detect(const DecisionContext& ctx) {
  require_links(ctx);
  if (ctx.prev_marginals == nullptr)
    throw std::invalid_argument("id_detect: previous-group marginals required");
  const MarginalSet& marg = *ctx.prev_marginals;
  if (static_cast<std::size_t>(marg.nodes()) != ctx.links.size())
    throw std::invalid_argument("id_detect: marginal count does not match fan-in");
  double total = 0.0;
  for (std::size_t i = 0; i < ctx.links.size(); ++i) {
    const double llr = ctx.links[i].llr(ctx.received[i]);
    total += id_log_ratio_term(llr, marg.p_correct[i]);
  }
  return sign_of(total);
}

Symbol pjp_detect(const DecisionContext& ctx, int n_f) {
  require_links(ctx);
  const int n = static_cast<int>(ctx.links.size());
  thread_local int cached_n = -1;
  thread_local int cached_nf = -1;
  thread_local std::optional<JointPmf> cached;
  if (cached_n != n || cached_nf != n_f) {
    cached = pjp_pmf(n, n_f);
    cached_n = n;
    cached_nf = n_f;
  }
  DecisionContext with_pmf = ctx;
  with_pmf.prev_pmf = &*cached;
  return map_detect(with_pmf);
}

Symbol mrc_detect(const DecisionContext& ctx) {
  require_links(ctx);
  double combined = 0.0;
  for (std::size_t i = 0; i < ctx.links.size(); ++i) {
    const ChannelSpec& link = ctx.links[i];
    const double weight = link.mode() == FadingMode::known_csi
                              ? link.gain()
                              : link.sigma_h_sq();
    combined += weight * ctx.received[i];
  }
  return sign_of(combined);
}

}  // namespace relaysim
