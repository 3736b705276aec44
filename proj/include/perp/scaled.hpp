#pragma once

#include <cstdint>
#include <iosfwd>

namespace perp {

/// Signed real stored as sign * mantissa * 2^exponent with a 64-bit exponent.
///
/// Products of thousands of multipliers and the recursion values built from
/// them leave double range quickly (|R_n| grows like e^{mu n}); this type
/// keeps full double precision in the mantissa while the exponent absorbs
/// the growth. Zero is the unique value with sign 0, exponent 0, mantissa 1.
struct ScaledReal {
  int sign = 0;
  std::int64_t exponent = 0;
  double mantissa = 1.0;

  static constexpr std::int64_t kMaxExponent = std::int64_t{1} << 62;

  static constexpr ScaledReal zero() noexcept { return {}; }

  bool is_zero() const noexcept { return sign == 0; }

  friend bool operator==(const ScaledReal&, const ScaledReal&) = default;
};

/// Exact conversion of a finite double. Throws InvalidInput otherwise.
ScaledReal from_real(double x);

/// Builds sign * e^{log_abs}. Used for values like Q = e^Y whose logarithm is
/// known but whose magnitude need not fit in a double.
ScaledReal from_log(int sign, double log_abs);

/// sign * 2^{log2_abs}, exact when log2_abs is an integer.
ScaledReal from_log2(int sign, double log2_abs);

ScaledReal mul(const ScaledReal& a, const ScaledReal& b);

/// Aligns to the larger exponent. When the exponent gap exceeds
/// kAbsorbGap the smaller operand is dropped.
ScaledReal add(const ScaledReal& a, const ScaledReal& b);

inline constexpr std::int64_t kAbsorbGap = 64;

inline ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) { return mul(a, b); }
inline ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) { return add(a, b); }

ScaledReal negate(const ScaledReal& a) noexcept;

/// sgn(a) * |a|^t as a double. Throws RangeError if the result is not finite.
double signed_pow(const ScaledReal& a, double t);

/// ln|a|. Throws DomainError for zero.
double log_abs(const ScaledReal& a);

/// Native value; throws RangeError when |a| exceeds the double range.
/// Values below the normal range underflow the way ldexp does.
double to_real(const ScaledReal& a);

/// Total order on represented values.
bool less(const ScaledReal& a, const ScaledReal& b) noexcept;

std::ostream& operator<<(std::ostream& os, const ScaledReal& a);

}  // namespace perp
