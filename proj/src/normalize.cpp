#include "perp/normalize.hpp"

#include <cmath>

#include "perp/error.hpp"

namespace perp {

namespace {

[[noreturn]] void bad(const char* what) { throw Error(ErrorCode::InvalidArguments, what); }

double require(const std::optional<double>& v, const char* what) {
  if (!v || !std::isfinite(*v)) bad(what);
  return *v;
}

// Saturates to +inf: the exp-type limits (e^V with V Frechet) put positive
// mass beyond the double range, and KS only needs the order of the values.
double saturating_exp(double x) { return x > 709.782712893384 ? HUGE_VAL : std::exp(x); }

}  // namespace

Normalizer::Normalizer(const RegimeReport& regime, std::uint64_t n, std::optional<double> gamma_n)
    : kind_(regime.normalization) {
  if (n == 0) bad("normalization needs n >= 1");
  const double nn = static_cast<double>(n);
  sqrt_n_ = std::sqrt(nn);
  switch (kind_) {
    case Normalization::GeometricScale: {
      const double rho = require(regime.params.rho, "Case I regime lacks rho");
      if (!(rho > 1.0)) bad("Case I needs rho > 1");
      geometric_scale_ = from_log2(1, -(nn - 1.0) * std::log2(rho));
      break;
    }
    case Normalization::LogNormalAbs:
    case Normalization::LogNormalSigned: {
      const double mu = require(regime.params.mu, "Case II regime lacks mu");
      const double v = require(regime.params.v, "Case II regime lacks v");
      if (!(v > 0.0)) bad("Case II needs v > 0");
      log_divisor_ = v * sqrt_n_;
      log_shift_ = mu * sqrt_n_ / v;
      break;
    }
    case Normalization::SqrtPower: {
      const double v = require(regime.params.v, "Case III regime lacks v");
      if (!(v > 0.0)) bad("Case III needs v > 0");
      log_divisor_ = v * sqrt_n_;
      break;
    }
    case Normalization::TailPower: {
      if (!gamma_n || !(*gamma_n > 0.0) || !std::isfinite(*gamma_n)) {
        bad("tail-power normalization needs a positive gamma_n");
      }
      log_divisor_ = *gamma_n;
      break;
    }
    case Normalization::SqrtScale: break;
    case Normalization::None: bad("regime has no renorming");
  }
}

double Normalizer::operator()(const ScaledReal& r) const {
  switch (kind_) {
    case Normalization::GeometricScale: return to_real(mul(r, geometric_scale_));
    case Normalization::SqrtScale: return to_real(r) / sqrt_n_;
    default: break;
  }
  if ((kind_ == Normalization::SqrtPower || kind_ == Normalization::TailPower) && r.sign < 0) {
    bad("Case III normalization needs R_n > 0");
  }
  if (r.is_zero()) return 0.0;
  const double magnitude = saturating_exp(log_abs(r) / log_divisor_ - log_shift_);
  return kind_ == Normalization::LogNormalSigned ? r.sign * magnitude : magnitude;
}

std::vector<double> Normalizer::apply(std::span<const ScaledReal> values) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& r : values) out.push_back((*this)(r));
  return out;
}

double apply_normalization(const RegimeReport& regime, const ScaledReal& r, std::uint64_t n,
                           std::optional<double> gamma_n) {
  return Normalizer(regime, n, gamma_n)(r);
}

}  // namespace perp
