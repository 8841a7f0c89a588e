#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "relaysim/channel.hpp"

namespace relaysim {

/// Dense pmf over the 2^n joint decisions of a relay group, conditioned on
/// x = +1. Bit i-1 of an index holds z_i = (x_i + 1) / 2, so index 0 is the
/// all-wrong outcome and 2^n - 1 the all-correct one.
class JointPmf {
 public:
  JointPmf(int nodes, std::vector<double> probs);

  static JointPmf point_mass(int nodes, std::size_t index);
  static JointPmf uniform(int nodes);

  int nodes() const { return nodes_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> probs() const { return probs_; }

  static int node_cap() { return node_cap_; }
  static void set_node_cap(int cap);

 private:
  int nodes_;
  std::vector<double> probs_;
  static int node_cap_;
};

// Per-node probabilities of correct decision, P_i = P(x_i = x | x).
struct MarginalSet {
  std::vector<double> p_correct;

  int nodes() const { return static_cast<int>(p_correct.size()); }
  double error(int i) const { return 1.0 - p_correct[static_cast<std::size_t>(i)]; }
};

// Thrown by the pilot-scheme inversion when a node's transition block is
// singular (p_c = 1/2); the caller should drop that node.
struct UninformativeNodeError : std::runtime_error {
  explicit UninformativeNodeError(int node_index);
  int node;
};

// kappa encoding of a joint decision vector; bijective with decode.
std::size_t encode(std::span<const Symbol> decisions);
std::vector<Symbol> decode(std::size_t index, int nodes);

// Joint pmf under the independence approximation.
JointPmf product_pmf(const MarginalSet& marginals);

// pmf of -x conditioned on x = +1: entry kappa moves to its bitwise
// complement. Equals the pmf conditioned on x = -1 whenever the channel
// likelihoods are sign-symmetric.
JointPmf mirror(const JointPmf& pmf);

// Predefined joint pmf: uniform mass on outcomes with at least n_f correct
// decisions, zero elsewhere.
JointPmf pjp_pmf(int nodes, int n_f);

// Strict majority, the default n_f.
int pjp_default_threshold(int nodes);

// One relay group as seen by the estimators: node j of the group receives
// through incoming[j] (all entries sized like the previous group), and the
// previous group's decisions follow *prev_pmf.
struct GroupContext {
  std::vector<std::vector<ChannelSpec>> incoming;
  const JointPmf* prev_pmf = nullptr;

  int nodes() const { return static_cast<int>(incoming.size()); }
  int prev_nodes() const;
};

using NodeDecisionFn = std::function<Symbol(
    int node, std::span<const Observation> received,
    std::span<const ChannelSpec> links)>;

// Monte Carlo estimate of the group's joint decision pmf. Each sample draws
// one latent previous-decision vector shared by all nodes of the group (the
// shared latent is what creates the decision correlation), then that node's
// observations and decisions; outcomes are binned by kappa.
JointPmf estimate_mcs(const GroupContext& group, const NodeDecisionFn& decide,
                      std::uint64_t samples, const StreamKey& streams,
                      int threads = 1);

// Applies the inverse transition matrix in Kronecker-factored form,
// b = P^-1 p_kappa, one 2x2 block per node; O(n 2^n), the 2^n x 2^n matrix
// is never materialized. Entries of b sum to one but may be negative.
std::vector<double> transition_solve(std::span<const double> p_kappa,
                                     std::span<const double> per_node_pc);

struct ProjectionResult {
  std::vector<double> p_hat;     // projected probability vector
  double xi = 0.0;               // waterline
  double correction_norm = 0.0;  // l2 norm of the applied correction
};

// Least-norm correction onto the probability simplex. The KKT conditions
// give p_i = (b_i - xi)^+ with the unique waterline making the positive
// parts sum to one; found exactly by sorting.
ProjectionResult project_simplex(std::span<const double> b);

// Pilot-scheme estimate: invert the transition matrix on the empirical sign
// pmf, then project back onto the simplex.
JointPmf estimate_ps(std::span<const double> p_kappa_hat,
                     std::span<const double> per_node_pc);

// Exchangeable compression: entry w is the per-outcome probability shared
// by all outcomes with w correct decisions.
std::vector<double> compress_symmetric(const JointPmf& pmf);
JointPmf expand_symmetric(std::span<const double> weights, int nodes);

// Nearest level among {k / (2^bits - 1)}; ties round up.
double quantize_probability(double p, int bits);

}  // namespace relaysim
