#include "perp/scaled.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

#include "perp/error.hpp"

namespace perp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidArguments: return "InvalidArguments";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::ExponentOverflow: return "ExponentOverflow";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Unavailable: return "Unavailable";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

void check_exponent(std::int64_t e) {
  if (e > ScaledReal::kMaxExponent || e < -ScaledReal::kMaxExponent) {
    throw Error(ErrorCode::ExponentOverflow, "binary exponent beyond +-2^62");
  }
}

// v finite and nonzero; result represents v * 2^base.
ScaledReal normalized(double v, std::int64_t base) {
  int fe = 0;
  const double m = std::frexp(std::fabs(v), &fe);  // [0.5, 1)
  std::int64_t e = 0;
  if (__builtin_add_overflow(base, static_cast<std::int64_t>(fe - 1), &e)) {
    throw Error(ErrorCode::ExponentOverflow, "exponent addition overflowed");
  }
  check_exponent(e);
  return {v < 0 ? -1 : 1, e, 2.0 * m};
}

}  // namespace

ScaledReal from_real(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::InvalidInput, "from_real requires a finite value");
  }
  if (x == 0.0) return ScaledReal::zero();
  return normalized(x, 0);
}

ScaledReal from_log2(int sign, double log2_abs) {
  if (sign == 0 || log2_abs == -HUGE_VAL) return ScaledReal::zero();
  if (!std::isfinite(log2_abs)) {
    throw Error(ErrorCode::InvalidInput, "from_log2 requires a finite logarithm");
  }
  const double whole = std::floor(log2_abs);
  if (std::fabs(whole) > static_cast<double>(ScaledReal::kMaxExponent)) {
    throw Error(ErrorCode::ExponentOverflow, "binary exponent beyond +-2^62");
  }
  double m = std::exp2(log2_abs - whole);
  auto e = static_cast<std::int64_t>(whole);
  if (m >= 2.0) {
    m *= 0.5;
    ++e;
  }
  return {sign < 0 ? -1 : 1, e, m};
}

ScaledReal from_log(int sign, double log_abs) {
  if (sign == 0 || log_abs == -HUGE_VAL) return ScaledReal::zero();
  if (!std::isfinite(log_abs)) {
    throw Error(ErrorCode::InvalidInput, "from_log requires a finite logarithm");
  }
  // Inside the double range exp() is more accurate than the base-2 split.
  if (std::fabs(log_abs) < 700.0) {
    const double v = std::exp(log_abs);
    return normalized(sign < 0 ? -v : v, 0);
  }
  return from_log2(sign, log_abs / kLn2);
}

ScaledReal mul(const ScaledReal& a, const ScaledReal& b) {
  if (a.sign == 0 || b.sign == 0) return ScaledReal::zero();
  double m = a.mantissa * b.mantissa;  // [1, 4)
  std::int64_t e = 0;
  if (__builtin_add_overflow(a.exponent, b.exponent, &e)) {
    throw Error(ErrorCode::ExponentOverflow, "exponent addition overflowed");
  }
  if (m >= 2.0) {
    m *= 0.5;
    ++e;
  }
  check_exponent(e);
  return {a.sign * b.sign, e, m};
}

ScaledReal add(const ScaledReal& a, const ScaledReal& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const ScaledReal* hi = &a;
  const ScaledReal* lo = &b;
  if (b.exponent > a.exponent || (b.exponent == a.exponent && b.mantissa > a.mantissa)) {
    std::swap(hi, lo);
  }
  std::int64_t gap = 0;
  if (__builtin_sub_overflow(hi->exponent, lo->exponent, &gap) || gap > kAbsorbGap) {
    return *hi;
  }
  const double s = hi->sign * hi->mantissa +
                   lo->sign * std::ldexp(lo->mantissa, -static_cast<int>(gap));
  if (s == 0.0) return ScaledReal::zero();
  return normalized(s, hi->exponent);
}

ScaledReal negate(const ScaledReal& a) noexcept {
  ScaledReal r = a;
  r.sign = -r.sign;
  return r;
}

double signed_pow(const ScaledReal& a, double t) {
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::InvalidInput, "signed_pow requires a finite power");
  }
  if (a.sign == 0) return 0.0;
  if (t == 0.0) return static_cast<double>(a.sign);
  // |a|^t = 2^{e t} m^t; split e*t into an integer shift and a fraction.
  const auto e = static_cast<double>(a.exponent);
  const double et = e * t;
  if (!std::isfinite(et) || et > 1100.0) {
    throw Error(ErrorCode::RangeError, "signed_pow result exceeds the double range");
  }
  if (et < -1200.0) return a.sign > 0 ? 0.0 : -0.0;
  const double shift = std::floor(et);
  const double frac = std::fma(e, t, -shift);
  const double r = std::ldexp(std::exp2(frac) * std::pow(a.mantissa, t), static_cast<int>(shift));
  if (!std::isfinite(r)) {
    throw Error(ErrorCode::RangeError, "signed_pow result exceeds the double range");
  }
  return a.sign * r;
}

double log_abs(const ScaledReal& a) {
  if (a.sign == 0) throw Error(ErrorCode::DomainError, "log_abs of zero");
  return static_cast<double>(a.exponent) * kLn2 + std::log(a.mantissa);
}

double to_real(const ScaledReal& a) {
  if (a.sign == 0) return 0.0;
  if (a.exponent > 1023) {
    std::ostringstream os;
    os << "value 2^" << a.exponent << " exceeds the double range";
    throw Error(ErrorCode::RangeError, os.str());
  }
  if (a.exponent < -1100) return a.sign > 0 ? 0.0 : -0.0;
  return std::ldexp(a.sign * a.mantissa, static_cast<int>(a.exponent));
}

bool less(const ScaledReal& a, const ScaledReal& b) noexcept {
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign == 0) return false;
  const bool mag_less =
      a.exponent < b.exponent || (a.exponent == b.exponent && a.mantissa < b.mantissa);
  const bool mag_greater =
      a.exponent > b.exponent || (a.exponent == b.exponent && a.mantissa > b.mantissa);
  return a.sign > 0 ? mag_less : mag_greater;
}

std::ostream& operator<<(std::ostream& os, const ScaledReal& a) {
  return os << '(' << (a.sign > 0 ? '+' : a.sign < 0 ? '-' : '0') << ',' << a.exponent << ','
            << a.mantissa << ')';
}

}  // namespace perp
