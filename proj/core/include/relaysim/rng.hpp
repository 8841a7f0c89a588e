#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace relaysim {

// xoshiro256++ seeded through the splitmix64 finalizer.
//
// Substreams are derived by hashing (seed, stream, index), so every Monte
// Carlo unit (trial, estimator sample, pilot) owns an independent stream
// that can be replayed in any order and on any thread partition with
// identical results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = finalize(z);
    }
  }

  static Rng substream(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index) {
    std::uint64_t k = finalize(seed + 0x9e3779b97f4a7c15ULL);
    k = finalize(k ^ finalize(stream + 0x9e3779b97f4a7c15ULL));
    k = finalize(k ^ finalize(index + 0x9e3779b97f4a7c15ULL));
    return Rng(k);
  }

  // One-shot seed derivation (sweep points, nested campaigns).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return finalize(finalize(seed + 0x9e3779b97f4a7c15ULL) ^
                    finalize(salt + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform strictly inside (0,1); never returns an endpoint.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * 3.141592653589793238462643383279502884 * uniform();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // Rayleigh envelope with E[h^2] = sigma_h_sq, by inverse CDF.
  double rayleigh(double sigma_h_sq) {
    return std::sqrt(-sigma_h_sq * std::log(uniform()));
  }

  // Equiprobable +1 / -1.
  int symbol() { return (next() >> 63) ? 1 : -1; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Names a family of substreams; at(i) opens the i-th member.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Rng at(std::uint64_t index) const { return Rng::substream(seed, stream, index); }
};

}  // namespace relaysim
