#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "perp/error.hpp"
#include "perp/limits.hpp"
#include "perp/stats.hpp"

namespace perp {
namespace {

std::vector<double> draws(const LimitLaw& law, std::size_t n, std::uint64_t seed, unsigned terms = 40) {
  Stream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_limit(law, rng, terms);
  return out;
}

std::vector<double> negated(std::vector<double> xs) {
  for (auto& x : xs) x = -x;
  return xs;
}

RegimeReport report(CaseId id) {
  RegimeReport r;
  r.case_id = id;
  r.params.lambda = 0.5;
  r.params.p = 0.7;
  r.params.tail_index = -1.0;
  r.params.beta2 = 3.0;
  return r;
}

TEST(LimitFor, Examples) {
  EXPECT_EQ(limit_for(report(CaseId::ISym)).name(), "BernoulliConvolution(0.5)");
  EXPECT_EQ(limit_for(report(CaseId::IV)).name(), "Gaussian(3)");
  EXPECT_EQ(limit_for(report(CaseId::IIIEvt)).name(), "ExpFrechet(-1)");
  EXPECT_EQ(limit_for(report(CaseId::IAsym)).tag, LimitTag::SymmetrizedPerpetuity);
  EXPECT_EQ(limit_for(report(CaseId::IIIBoundaryVanishing)).tag, LimitTag::ExpHalfNormal);
  EXPECT_EQ(limit_for(report(CaseId::IIIBoundaryGrowing)).tag, LimitTag::ExpFrechet);
  for (auto id : {CaseId::Unsupported, CaseId::Convergent}) {
    try {
      limit_for(report(id));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Unsupported);
    }
  }
}

TEST(Cdf, Examples) {
  EXPECT_DOUBLE_EQ(cdf(LimitLaw::bernoulli_convolution(0.5), 1.0), 0.75);
  // 2 Phi(1) - 1 = 0.682689492137085897...
  EXPECT_NEAR(cdf(LimitLaw::exp_half_normal(), std::exp(1.0)), 0.6826894921370859, 1e-15);
  EXPECT_NEAR(cdf(LimitLaw::exp_frechet(-1.0), std::exp(1.0)), std::exp(-1.0), 1e-15);
  EXPECT_EQ(cdf(LimitLaw::lognormal_symmetric(), 0.0), 0.5);
}

TEST(Cdf, UnavailableWithoutClosedForm) {
  for (const auto& law : {LimitLaw::bernoulli_convolution(1.0 / 3.0),
                          LimitLaw::symmetrized_perpetuity(0.5, 0.7)}) {
    EXPECT_FALSE(law.has_cdf());
    try {
      cdf(law, 0.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Unavailable);
    }
  }
}

TEST(Cdf, GridProperties) {
  const std::vector<LimitLaw> laws = {
      LimitLaw::bernoulli_convolution(0.5), LimitLaw::lognormal_positive(),
      LimitLaw::lognormal_symmetric(),      LimitLaw::exp_half_normal(),
      LimitLaw::exp_frechet(-1.0),          LimitLaw::exp_frechet(-1.7),
      LimitLaw::gaussian(3.0)};
  for (const auto& law : laws) {
    double prev = 0.0;
    for (double x = -1e3; x <= 1e3; x += 0.25) {
      const double f = cdf(law, x);
      EXPECT_GE(f, prev) << law.name() << " at " << x;
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      EXPECT_NEAR(cdf(law, x + 1e-12), f, 1e-9) << law.name() << " at " << x;
      prev = f;
    }
    EXPECT_EQ(cdf(law, -HUGE_VAL), 0.0) << law.name();
    EXPECT_EQ(cdf(law, HUGE_VAL), 1.0) << law.name();
    EXPECT_GT(cdf(law, 1e6), 0.9) << law.name();
  }
}

TEST(SampleLimit, SamplerMatchesCdf) {
  const std::vector<LimitLaw> laws = {
      LimitLaw::bernoulli_convolution(0.5), LimitLaw::lognormal_positive(),
      LimitLaw::lognormal_symmetric(),      LimitLaw::exp_half_normal(),
      LimitLaw::exp_frechet(-1.0),          LimitLaw::exp_frechet(-1.7),
      LimitLaw::gaussian(3.0)};
  std::uint64_t seed = 100;
  for (const auto& law : laws) {
    const auto xs = draws(law, 100000, seed++);
    EXPECT_LT(ks_one_sample(xs, [&](double x) { return cdf(law, x); }), 0.007) << law.name();
  }
}

TEST(SampleLimit, SymmetricLaws) {
  for (const auto& law : {LimitLaw::lognormal_symmetric(), LimitLaw::symmetrized_perpetuity(0.5, 0.7),
                          LimitLaw::symmetrized_perpetuity(1.0 / 3.0, 0.9)}) {
    const auto xs = draws(law, 100000, 7);
    EXPECT_LT(ks_two_sample(xs, negated(xs)), 0.01) << law.name();
  }
}

TEST(SampleLimit, TruncationBound) {
  for (double lambda : {0.5, 1.0 / 3.0, 0.9}) {
    const auto law = LimitLaw::bernoulli_convolution(lambda);
    for (unsigned m : {1u, 5u, 30u}) {
      for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Stream a(seed);
        Stream b(seed);
        const double short_sum = sample_limit(law, a, m);
        const double long_sum = sample_limit(law, b, m + 20);
        // Partial sums are O(1); allow a few ulps of accumulated roundoff.
        EXPECT_LE(std::fabs(long_sum - short_sum), bc_truncation_bound(lambda, m) + 1e-14);
      }
    }
  }
}

TEST(TruncationBound, Examples) {
  EXPECT_NEAR(bc_truncation_bound(0.5, 30), 2.0 * std::ldexp(1.0, -30), 1e-24);
  EXPECT_EQ(bc_truncation_bound(0.5, 0), 2.0);
  // 0.9^200 / 0.1 = 7.05507910865533257e-9
  EXPECT_NEAR(bc_truncation_bound(0.9, 200), 7.0550791086553326e-9, 1e-20);
  EXPECT_EQ(series_terms_for(0.5), 31u);
}

TEST(LimitLaw, RejectsBadParameters) {
  EXPECT_THROW(LimitLaw::bernoulli_convolution(1.0), Error);
  EXPECT_THROW(LimitLaw::symmetrized_perpetuity(0.5, 0.0), Error);
  EXPECT_THROW(LimitLaw::exp_frechet(0.5), Error);
  EXPECT_THROW(LimitLaw::gaussian(0.0), Error);
}

}  // namespace
}  // namespace perp
