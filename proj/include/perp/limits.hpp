#pragma once

#include <string>

#include "perp/model.hpp"
#include "perp/random.hpp"

namespace perp {

/// Reference law that a renormed R_n converges to.
///
///   BernoulliConvolution(l)     sum_{k>=1} l^{k-1} eps_k, symmetric eps
///   SymmetrizedPerpetuity(l,p)  r * sum_{k>=0} l^k prod_{j<=k} eps_j,
///                               P(eps = 1) = p, r an independent fair sign
///   LogNormalPositive           e^N
///   LogNormalSymmetric          r e^N
///   ExpHalfNormal               e^{|N|}
///   ExpFrechet(alpha)           e^V, P(V <= x) = exp(-x^alpha) for x > 0
///   Gaussian(beta2)             sqrt(beta2) N
struct LimitLaw {
  LimitTag tag = LimitTag::None;
  double lambda = 0.5;
  double p = 0.5;
  double alpha = -1.0;
  double beta2 = 1.0;

  static LimitLaw bernoulli_convolution(double lambda);
  static LimitLaw symmetrized_perpetuity(double lambda, double p);
  static LimitLaw lognormal_positive();
  static LimitLaw lognormal_symmetric();
  static LimitLaw exp_half_normal();
  static LimitLaw exp_frechet(double alpha);
  static LimitLaw gaussian(double beta2);

  /// Closed-form CDF available. Bernoulli convolutions only at lambda = 1/2.
  bool has_cdf() const noexcept;

  /// For example "BernoulliConvolution(0.5)" or "Gaussian(3)".
  std::string name() const;
};

/// Throws Unsupported for the CONVERGENT and UNSUPPORTED regimes.
LimitLaw limit_for(const RegimeReport& regime);

/// One draw. Series laws are truncated after `series_terms` terms and
/// consume exactly that many uniforms (plus one leading uniform for the
/// symmetrizing sign); the other laws use one normal or one uniform.
double sample_limit(const LimitLaw& law, Stream& rng, unsigned series_terms);

/// Throws Unavailable when !law.has_cdf().
double cdf(const LimitLaw& law, double x);

/// lambda^m / (1 - lambda), the remainder bound after m series terms.
double bc_truncation_bound(double lambda, unsigned m);

/// Smallest m with bc_truncation_bound(lambda, m) < target.
unsigned series_terms_for(double lambda, double target = 1e-9);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace perp
