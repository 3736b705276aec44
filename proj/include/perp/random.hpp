#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace perp {

/// SplitMix64 finalizer. A bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of trajectory `index` in a batch keyed by `master`.
///
/// seed_i = mix64(master ^ mix64(index)). Depends only on (master, index), so
/// a batch produces the same trajectories however it is split across workers.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index));
}

/// Random stream used by all samplers.
///
/// uniform() consumes one engine word; normal() consumes two words on every
/// other call (Box-Muller pairs, second value cached).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// +1 with probability p, -1 otherwise.
  int sign(double p) noexcept { return uniform() < p ? 1 : -1; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t raw() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace perp
