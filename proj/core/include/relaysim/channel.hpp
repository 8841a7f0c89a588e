#pragma once

#include "relaysim/rng.hpp"

namespace relaysim {

// BPSK symbol, one of {-1, +1}.
using Symbol = int;

// Received sample y = h x + w.
using Observation = double;

enum class FadingMode { known_csi, known_stats };

// Precomputed constants of the Rayleigh-marginalized likelihood
//   f(y|x) = normalizer * exp(-y^2/(2 sigma^2))
//            * (1 + sqrt(2 pi) a x y Phi(a x y) exp(a^2 y^2 / 2)),
// with a = sigma_h / (sigma * sqrt(2 sigma^2 + sigma_h^2)).
struct StatsLikelihoodParams {
  double a = 0.0;
  double normalizer = 0.0;
  double sigma_sq = 0.0;
  double sigma_h_sq = 0.0;

  static StatsLikelihoodParams make(double sigma_sq, double sigma_h_sq);
};

/// A single directed link: noise variance plus either a fixed fading
/// envelope (known CSI) or the Rayleigh scale of its distribution
/// (known statistics only).
class ChannelSpec {
 public:
  static ChannelSpec known_csi(double h, double noise_variance);
  static ChannelSpec known_stats(double sigma_h_sq, double noise_variance);

  FadingMode mode() const { return mode_; }
  double noise_variance() const { return sigma_sq_; }

  // h^2/sigma^2 under known CSI, sigma_h^2/sigma^2 under known statistics.
  double snr() const;

  double gain() const;        // known-CSI envelope h, rejects stats mode
  double sigma_h_sq() const;  // Rayleigh scale, rejects CSI mode
  const StatsLikelihoodParams& stats_params() const;

  // Per-link log-likelihood ratio of the transmitted symbol at sample y.
  double llr(double y) const;
  // f(y | x) for this link's knowledge scenario.
  double likelihood(double y, Symbol x) const;

 private:
  ChannelSpec() = default;
  FadingMode mode_ = FadingMode::known_csi;
  double sigma_sq_ = 1.0;
  double h_ = 0.0;
  double sigma_h_sq_v_ = 0.0;
  StatsLikelihoodParams stats_{};
};

// Gaussian tail probability Q(z) = 1 - Phi(z), evaluated through erfc.
double q_function(double z);

// Standard normal CDF.
double normal_cdf(double z);

// Draw a Rayleigh envelope for a known-statistics link.
double sample_fading(const ChannelSpec& spec, Rng& rng);

// Draw y = h x + w. Known statistics composes a fresh Rayleigh envelope
// with Gaussian noise, which marginalizes to the stats likelihood exactly.
Observation sample_observation(Symbol x, const ChannelSpec& spec, Rng& rng);

// Gaussian likelihood (2 pi sigma^2)^(-1/2) exp(-(y - h x)^2 / (2 sigma^2)).
double likelihood_csi(double y, double h, Symbol x, double sigma_sq);

// Rayleigh-marginalized likelihood f(y|x).
double likelihood_stats(double y, Symbol x, const StatsLikelihoodParams& p);

// log f(y|+1) - log f(y|-1) = 2 y h / sigma^2.
double llr_csi(double y, double h, double sigma_sq);

// log of the stats likelihood ratio; odd in y and safe for large |a y|
// (switches to an asymptotic form instead of overflowing exp(a^2 y^2 / 2)).
double llr_stats(double y, const StatsLikelihoodParams& p);

// Error probability of the sign rule on a single link:
// Q(sqrt(snr)) under known CSI, the Rayleigh closed form under statistics.
double ber_first_hop(const ChannelSpec& spec);

}  // namespace relaysim
