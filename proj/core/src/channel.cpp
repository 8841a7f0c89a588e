#include "relaysim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace relaysim {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599344;

// Crossover to the asymptotic form of llr_stats.
constexpr double kLlrAsymptoticCut = 26.0;

void require_symbol(Symbol x) {
  if (x != 1 && x != -1) throw std::invalid_argument("symbol must be +1 or -1");
}

}  // namespace

double q_function(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

StatsLikelihoodParams StatsLikelihoodParams::make(double sigma_sq,
                                                  double sigma_h_sq) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be > 0");
  if (!(sigma_h_sq > 0.0)) throw std::invalid_argument("sigma_h_sq must be > 0");
  StatsLikelihoodParams p;
  p.sigma_sq = sigma_sq;
  p.sigma_h_sq = sigma_h_sq;
  const double sigma = std::sqrt(sigma_sq);
  p.a = std::sqrt(sigma_h_sq) / (sigma * std::sqrt(2.0 * sigma_sq + sigma_h_sq));
  p.normalizer =
      std::sqrt(2.0 / 3.141592653589793238462643383279502884) *
      sigma_sq * sigma * p.a * p.a / sigma_h_sq;
  return p;
}

ChannelSpec ChannelSpec::known_csi(double h, double noise_variance) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be > 0");
  if (!(h >= 0.0)) throw std::invalid_argument("fading envelope must be >= 0");
  ChannelSpec s;
  s.mode_ = FadingMode::known_csi;
  s.sigma_sq_ = noise_variance;
  s.h_ = h;
  return s;
}

ChannelSpec ChannelSpec::known_stats(double sigma_h_sq, double noise_variance) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be > 0");
  if (!(sigma_h_sq > 0.0)) throw std::invalid_argument("sigma_h_sq must be > 0");
  ChannelSpec s;
  s.mode_ = FadingMode::known_stats;
  s.sigma_sq_ = noise_variance;
  s.sigma_h_sq_v_ = sigma_h_sq;
  s.stats_ = StatsLikelihoodParams::make(noise_variance, sigma_h_sq);
  return s;
}

double ChannelSpec::snr() const {
  return mode_ == FadingMode::known_csi ? h_ * h_ / sigma_sq_
                                        : sigma_h_sq_v_ / sigma_sq_;
}

double ChannelSpec::gain() const {
  if (mode_ != FadingMode::known_csi)
    throw std::logic_error("gain() requires known-CSI mode");
  return h_;
}

double ChannelSpec::sigma_h_sq() const {
  if (mode_ != FadingMode::known_stats)
    throw std::logic_error("sigma_h_sq() requires known-statistics mode");
  return sigma_h_sq_v_;
}

const StatsLikelihoodParams& ChannelSpec::stats_params() const {
  if (mode_ != FadingMode::known_stats)
    throw std::logic_error("stats_params() requires known-statistics mode");
  return stats_;
}

double ChannelSpec::llr(double y) const {
  return mode_ == FadingMode::known_csi ? llr_csi(y, h_, sigma_sq_)
                                        : llr_stats(y, stats_);
}

double ChannelSpec::likelihood(double y, Symbol x) const {
  return mode_ == FadingMode::known_csi
             ? likelihood_csi(y, h_, x, sigma_sq_)
             : likelihood_stats(y, x, stats_);
}

double sample_fading(const ChannelSpec& spec, Rng& rng) {
  if (spec.mode() != FadingMode::known_stats)
    throw std::logic_error("sample_fading requires known-statistics mode");
  return rng.rayleigh(spec.sigma_h_sq());
}

Observation sample_observation(Symbol x, const ChannelSpec& spec, Rng& rng) {
  require_symbol(x);
  const double h = spec.mode() == FadingMode::known_csi
                       ? spec.gain()
                       : rng.rayleigh(spec.sigma_h_sq());
  return h * static_cast<double>(x) +
         std::sqrt(spec.noise_variance()) * rng.gaussian();
}

double likelihood_csi(double y, double h, Symbol x, double sigma_sq) {
  require_symbol(x);
  if (!(h >= 0.0)) throw std::invalid_argument("fading envelope must be >= 0");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be > 0");
  const double d = y - h * static_cast<double>(x);
  return kInvSqrt2Pi / std::sqrt(sigma_sq) * std::exp(-d * d / (2.0 * sigma_sq));
}

double likelihood_stats(double y, Symbol x, const StatsLikelihoodParams& p) {
  require_symbol(x);
  const double t = p.a * static_cast<double>(x) * y;
  // Splitting the product keeps both exponents non-positive: a^2 < 1/sigma^2.
  const double e1 = std::exp(-y * y / (2.0 * p.sigma_sq));
  const double e2 = std::exp(0.5 * t * t - y * y / (2.0 * p.sigma_sq));
  return p.normalizer * (e1 + kSqrt2Pi * t * normal_cdf(t) * e2);
}

double llr_csi(double y, double h, double sigma_sq) {
  if (!(h >= 0.0)) throw std::invalid_argument("fading envelope must be >= 0");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be > 0");
  return 2.0 * y * h / sigma_sq;
}

double llr_stats(double y, const StatsLikelihoodParams& p) {
  const double t = p.a * std::abs(y);
  double v;
  if (t < kLlrAsymptoticCut) {
    const double et = std::exp(0.5 * t * t);
    const double grow = kSqrt2Pi * t * normal_cdf(t) * et;
    const double shrink = kSqrt2Pi * t * normal_cdf(-t) * et;  // in [0, 1)
    v = std::log1p(grow) - std::log1p(-shrink);
  } else {
    // 1 - shrink = t^-2 (1 - 3/t^2 + 15/t^4 - 105/t^6 + 945/t^8 + ...),
    // and log(1 + grow) ~= t^2/2 + log(sqrt(2 pi) t) once 1/grow underflows.
    const double w = 1.0 / (t * t);
    const double series = w * (-3.0 + w * (15.0 + w * (-105.0 + w * 945.0)));
    v = 0.5 * t * t + std::log(kSqrt2Pi * t) + 2.0 * std::log(t) -
        std::log1p(series);
  }
  if (y < 0.0) return -v;
  if (y > 0.0) return v;
  return 0.0;
}

double ber_first_hop(const ChannelSpec& spec) {
  const double snr = spec.snr();
  if (spec.mode() == FadingMode::known_csi) return q_function(std::sqrt(snr));
  const double half = 0.5 * snr;
  return 0.5 * (1.0 - std::sqrt(half / (half + 1.0)));
}

}  // namespace relaysim
