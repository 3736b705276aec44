#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "perp/error.hpp"
#include "perp/normalize.hpp"

namespace perp {
namespace {

RegimeReport regime(Normalization kind) {
  RegimeReport r;
  r.normalization = kind;
  r.params.rho = 2.0;
  r.params.mu = 0.5;
  r.params.v = 1.0;
  return r;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvalidInput;
}

TEST(Normalize, Examples) {
  EXPECT_EQ(apply_normalization(regime(Normalization::GeometricScale), from_real(16.0), 5), 1.0);
  EXPECT_NEAR(apply_normalization(regime(Normalization::LogNormalSigned), from_log(-1, 4.0), 4),
              -std::exp(1.0), 1e-14);
  EXPECT_NEAR(apply_normalization(regime(Normalization::TailPower), from_log(1, 200.0), 1, 100.0),
              std::exp(2.0), 1e-14);
  EXPECT_EQ(apply_normalization(regime(Normalization::SqrtScale), from_real(5.0), 100), 0.5);
}

TEST(Normalize, GeometricScaleBeyondDoubleRange) {
  // R = 2^3000 * 1.5 at n = 3000 maps to 3.
  const ScaledReal r{1, 3000, 1.5};
  EXPECT_EQ(apply_normalization(regime(Normalization::GeometricScale), r, 3000), 3.0);
}

TEST(Normalize, ZeroMapsToZero) {
  for (auto kind : {Normalization::LogNormalAbs, Normalization::LogNormalSigned,
                    Normalization::SqrtPower}) {
    EXPECT_EQ(apply_normalization(regime(kind), ScaledReal::zero(), 10), 0.0);
  }
  EXPECT_EQ(apply_normalization(regime(Normalization::TailPower), ScaledReal::zero(), 10, 3.0), 0.0);
}

TEST(Normalize, ArgumentErrors) {
  EXPECT_EQ(code_of([] { Normalizer(regime(Normalization::None), 10); }),
            ErrorCode::InvalidArguments);
  EXPECT_EQ(code_of([] { Normalizer(regime(Normalization::SqrtScale), 0); }),
            ErrorCode::InvalidArguments);
  EXPECT_EQ(code_of([] { Normalizer(regime(Normalization::TailPower), 10); }),
            ErrorCode::InvalidArguments);
  EXPECT_EQ(code_of([] { apply_normalization(regime(Normalization::SqrtPower), from_real(-2.0), 4); }),
            ErrorCode::InvalidArguments);
  EXPECT_EQ(code_of([] { apply_normalization(regime(Normalization::SqrtScale), ScaledReal{1, 5000, 1.0}, 4); }),
            ErrorCode::RangeError);
}

TEST(Normalize, PowerNormalizationsSaturate) {
  EXPECT_EQ(apply_normalization(regime(Normalization::SqrtPower), from_log(1, 1e6), 1), HUGE_VAL);
  EXPECT_EQ(apply_normalization(regime(Normalization::LogNormalSigned), from_log(-1, 1e6), 1),
            -HUGE_VAL);
  EXPECT_EQ(apply_normalization(regime(Normalization::TailPower), from_log(1, 1e6), 1, 10.0), HUGE_VAL);
}

TEST(Normalize, SignPreservation) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> lg(0.0, 30.0);
  std::bernoulli_distribution neg(0.5);
  const Normalizer signed_n(regime(Normalization::LogNormalSigned), 50);
  const Normalizer abs_n(regime(Normalization::LogNormalAbs), 50);
  for (int i = 0; i < 10000; ++i) {
    const int s = neg(gen) ? -1 : 1;
    const auto r = from_log(s, lg(gen));
    EXPECT_EQ(std::signbit(signed_n(r)), s < 0);
    EXPECT_GT(abs_n(r), 0.0);
  }
}

TEST(Normalize, ScaledPathMatchesNativeFormula) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  const double n = 400.0;
  const double mu = 0.5;
  const double v = 1.0;
  const double rho = 2.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = std::copysign(std::pow(10.0, mag(gen) / 10.0), mag(gen));
    const auto r = from_real(x);
    const auto rel = [](double got, double want) {
      return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
    };
    EXPECT_LT(rel(apply_normalization(regime(Normalization::LogNormalSigned), r, 400),
                  std::copysign(std::pow(std::fabs(x), 1.0 / (v * std::sqrt(n))), x) /
                      std::exp(mu * std::sqrt(n) / v)),
              1e-10);
    if (x > 0) {
      EXPECT_LT(rel(apply_normalization(regime(Normalization::SqrtPower), r, 400),
                    std::pow(x, 1.0 / (v * std::sqrt(n)))),
                1e-10);
      EXPECT_LT(rel(apply_normalization(regime(Normalization::TailPower), r, 400, 37.5),
                    std::pow(x, 1.0 / 37.5)),
                1e-10);
    }
    EXPECT_LT(rel(apply_normalization(regime(Normalization::GeometricScale), r, 40),
                  x / std::pow(rho, 39.0)),
              1e-10);
    EXPECT_LT(rel(apply_normalization(regime(Normalization::SqrtScale), r, 400), x / 20.0), 1e-10);
  }
}

TEST(Normalize, Monotone) {
  std::vector<ScaledReal> grid;
  for (int k = -400; k <= 400; ++k) grid.push_back(from_log(k < 0 ? -1 : 1, std::abs(k) * 0.37 - 30.0));
  std::sort(grid.begin(), grid.end(), less);
  for (auto kind : {Normalization::LogNormalSigned, Normalization::GeometricScale,
                    Normalization::SqrtScale}) {
    const Normalizer f(regime(kind), 30);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (less(grid[i - 1], grid[i])) EXPECT_LE(f(grid[i - 1]), f(grid[i]));
    }
  }
  const Normalizer abs_n(regime(Normalization::LogNormalAbs), 30);
  for (int k = 1; k < 400; ++k) {
    EXPECT_LT(abs_n(from_log(-1, k * 0.1)), abs_n(from_log(1, (k + 1) * 0.1)));
  }
}

}  // namespace
}  // namespace perp
