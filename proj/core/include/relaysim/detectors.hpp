#pragma once

#include <span>

#include "relaysim/channel.hpp"
#include "relaysim/pmf.hpp"

namespace relaysim {

// Everything a node has when deciding: its received vector, the matching
// link specs, and whichever side information the rule needs about the
// previous group.
struct DecisionContext {
  std::span<const Observation> received;
  std::span<const ChannelSpec> links;
  const JointPmf* prev_pmf = nullptr;
  const MarginalSet* prev_marginals = nullptr;
};

// sgn with the fixed tie rule sgn(0) = +1.
inline Symbol sign_of(double v) { return v < 0.0 ? -1 : 1; }

// First-group rule: the sign of the single received sample.
inline Symbol detect_first_group(Observation y) { return sign_of(y); }

// Full MAP rule with an explicit joint pmf of the previous group's
// decisions. The posterior ratio is evaluated with a global max shift
// (per-link normalized likelihood pairs), falling back to per-side
// log-sum-exp in the rare case both sides underflow.
Symbol map_detect(const DecisionContext& ctx);

// One additive term of the independence detector:
// log(L P + (1-P)) - log(P + L (1-P)) with L = exp(llr), evaluated stably.
double id_log_ratio_term(double llr, double p_correct);

// Independence-approximation rule: sum of per-link terms over marginals.
Symbol id_detect(const DecisionContext& ctx);

// MAP rule against the predefined joint pmf with threshold n_f.
Symbol pjp_detect(const DecisionContext& ctx, int n_f);

// Maximal-ratio combining: gains as weights under known CSI, average-SNR
// (Rayleigh scale) weights when only statistics are known.
Symbol mrc_detect(const DecisionContext& ctx);

}  // namespace relaysim
