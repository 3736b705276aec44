#include "perp/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perp/error.hpp"

namespace perp {

namespace {

[[noreturn]] void bad(const char* what) { throw Error(ErrorCode::InvalidArguments, what); }

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) bad("series limit needs lambda in (0,1)");
}

}  // namespace

LimitLaw LimitLaw::bernoulli_convolution(double lambda) {
  check_lambda(lambda);
  LimitLaw l;
  l.tag = LimitTag::BernoulliConvolution;
  l.lambda = lambda;
  return l;
}

LimitLaw LimitLaw::symmetrized_perpetuity(double lambda, double p) {
  check_lambda(lambda);
  if (!(p > 0.0 && p < 1.0)) bad("symmetrized perpetuity needs p in (0,1)");
  LimitLaw l;
  l.tag = LimitTag::SymmetrizedPerpetuity;
  l.lambda = lambda;
  l.p = p;
  return l;
}

LimitLaw LimitLaw::lognormal_positive() {
  LimitLaw l;
  l.tag = LimitTag::LogNormalPositive;
  return l;
}

LimitLaw LimitLaw::lognormal_symmetric() {
  LimitLaw l;
  l.tag = LimitTag::LogNormalSymmetric;
  return l;
}

LimitLaw LimitLaw::exp_half_normal() {
  LimitLaw l;
  l.tag = LimitTag::ExpHalfNormal;
  return l;
}

LimitLaw LimitLaw::exp_frechet(double alpha) {
  if (!(alpha < 0.0) || !std::isfinite(alpha)) bad("Frechet index must be negative");
  LimitLaw l;
  l.tag = LimitTag::ExpFrechet;
  l.alpha = alpha;
  return l;
}

LimitLaw LimitLaw::gaussian(double beta2) {
  if (!(beta2 > 0.0) || !std::isfinite(beta2)) bad("Gaussian limit needs beta^2 > 0");
  LimitLaw l;
  l.tag = LimitTag::Gaussian;
  l.beta2 = beta2;
  return l;
}

bool LimitLaw::has_cdf() const noexcept {
  switch (tag) {
    case LimitTag::BernoulliConvolution: return lambda == 0.5;
    case LimitTag::SymmetrizedPerpetuity:
    case LimitTag::None: return false;
    default: return true;
  }
}

std::string LimitLaw::name() const {
  std::ostringstream os;
  os << to_string(tag);
  switch (tag) {
    case LimitTag::BernoulliConvolution: os << '(' << lambda << ')'; break;
    case LimitTag::SymmetrizedPerpetuity: os << '(' << lambda << ", " << p << ')'; break;
    case LimitTag::ExpFrechet: os << '(' << alpha << ')'; break;
    case LimitTag::Gaussian: os << '(' << beta2 << ')'; break;
    default: break;
  }
  return os.str();
}

LimitLaw limit_for(const RegimeReport& regime) {
  const auto& prm = regime.params;
  switch (regime.case_id) {
    case CaseId::ISym: return LimitLaw::bernoulli_convolution(prm.lambda.value());
    case CaseId::IAsym:
      return LimitLaw::symmetrized_perpetuity(prm.lambda.value(), prm.p.value());
    case CaseId::IIAbs: return LimitLaw::lognormal_positive();
    case CaseId::IISigned: return LimitLaw::lognormal_symmetric();
    case CaseId::IIIClt:
    case CaseId::IIIBoundaryVanishing: return LimitLaw::exp_half_normal();
    case CaseId::IIIEvt:
    case CaseId::IIIBoundaryGrowing: return LimitLaw::exp_frechet(prm.tail_index.value());
    case CaseId::IV: return LimitLaw::gaussian(prm.beta2.value());
    case CaseId::Convergent:
      throw Error(ErrorCode::Unsupported, "convergent regime has no divergent-case limit law");
    case CaseId::Unsupported: break;
  }
  throw Error(ErrorCode::Unsupported, "regime has no known renormed limit");
}

double sample_limit(const LimitLaw& law, Stream& rng, unsigned series_terms) {
  switch (law.tag) {
    case LimitTag::BernoulliConvolution: {
      if (series_terms < 1) bad("series laws need at least one term");
      double sum = 0.0;
      double weight = 1.0;
      for (unsigned k = 0; k < series_terms; ++k) {
        sum += weight * rng.sign(0.5);
        weight *= law.lambda;
      }
      return sum;
    }
    case LimitTag::SymmetrizedPerpetuity: {
      if (series_terms < 1) bad("series laws need at least one term");
      const int r = rng.sign(0.5);
      double sum = 1.0;
      double term = 1.0;
      for (unsigned k = 1; k < series_terms; ++k) {
        term *= law.lambda * rng.sign(law.p);
        sum += term;
      }
      return r * sum;
    }
    case LimitTag::LogNormalPositive: return std::exp(rng.normal());
    case LimitTag::LogNormalSymmetric: {
      const int r = rng.sign(0.5);
      return r * std::exp(rng.normal());
    }
    case LimitTag::ExpHalfNormal: return std::exp(std::fabs(rng.normal()));
    case LimitTag::ExpFrechet:
      return std::exp(std::pow(-std::log(rng.uniform()), 1.0 / law.alpha));
    case LimitTag::Gaussian: return std::sqrt(law.beta2) * rng.normal();
    case LimitTag::None: break;
  }
  bad("no limit law to sample");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double cdf(const LimitLaw& law, double x) {
  if (!law.has_cdf()) {
    throw Error(ErrorCode::Unavailable, law.name() + " has no closed-form CDF");
  }
  switch (law.tag) {
    case LimitTag::BernoulliConvolution: return std::clamp((x + 2.0) / 4.0, 0.0, 1.0);
    case LimitTag::LogNormalPositive: return x > 0.0 ? normal_cdf(std::log(x)) : 0.0;
    case LimitTag::LogNormalSymmetric:
      if (x == 0.0) return 0.5;
      return x > 0.0 ? 0.5 + 0.5 * normal_cdf(std::log(x)) : 0.5 - 0.5 * normal_cdf(std::log(-x));
    case LimitTag::ExpHalfNormal: return x >= 1.0 ? 2.0 * normal_cdf(std::log(x)) - 1.0 : 0.0;
    case LimitTag::ExpFrechet: return x > 1.0 ? std::exp(-std::pow(std::log(x), law.alpha)) : 0.0;
    case LimitTag::Gaussian: return normal_cdf(x / std::sqrt(law.beta2));
    default: break;
  }
  throw Error(ErrorCode::Unavailable, law.name() + " has no closed-form CDF");
}

double bc_truncation_bound(double lambda, unsigned m) {
  check_lambda(lambda);
  return std::pow(lambda, static_cast<double>(m)) / (1.0 - lambda);
}

unsigned series_terms_for(double lambda, double target) {
  unsigned m = 1;
  while (bc_truncation_bound(lambda, m) >= target) ++m;
  return m;
}

}  // namespace perp
