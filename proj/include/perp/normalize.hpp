#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perp/model.hpp"
#include "perp/scaled.hpp"

namespace perp {

/// Regime-specific map from R_n to its renormed value at a fixed n.
///
/// Constants depending only on (regime, n) are computed once; in particular
/// rho^{-(n-1)} is built directly in scaled form rather than by n - 1
/// multiplications. A zero R_n maps to 0 in the power normalizations.
class Normalizer {
 public:
  /// Throws InvalidArguments when the regime has no renorming, when n is 0,
  /// or when a tail-power regime is given no gamma_n.
  Normalizer(const RegimeReport& regime, std::uint64_t n, std::optional<double> gamma_n = {});

  /// Throws InvalidArguments for R_n < 0 in the Case III regimes. The power
  /// normalizations saturate to +-inf beyond the double range; the linear ones
  /// throw RangeError there.
  double operator()(const ScaledReal& r) const;

  std::vector<double> apply(std::span<const ScaledReal> values) const;

  Normalization kind() const noexcept { return kind_; }

 private:
  Normalization kind_;
  ScaledReal geometric_scale_;  // rho^{-(n-1)}
  double log_divisor_ = 1.0;    // v sqrt(n) or gamma_n
  double log_shift_ = 0.0;      // mu sqrt(n) / v
  double sqrt_n_ = 1.0;
};

double apply_normalization(const RegimeReport& regime, const ScaledReal& r, std::uint64_t n,
                           std::optional<double> gamma_n = {});

}  // namespace perp
