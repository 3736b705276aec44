#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "perp/error.hpp"
#include "perp/scaled.hpp"

namespace perp {
namespace {

ScaledReal sr(int sign, std::int64_t exponent, double mantissa) {
  return ScaledReal{sign, exponent, mantissa};
}

void expect_scaled(const ScaledReal& got, int sign, std::int64_t exponent, double mantissa) {
  EXPECT_EQ(got.sign, sign);
  EXPECT_EQ(got.exponent, exponent);
  EXPECT_DOUBLE_EQ(got.mantissa, mantissa);
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

TEST(FromReal, Examples) {
  expect_scaled(from_real(0.0), 0, 0, 1.0);
  expect_scaled(from_real(-8.0), -1, 3, 1.0);
  expect_scaled(from_real(3.0), 1, 1, 1.5);
}

TEST(FromReal, RejectsNonFinite) {
  EXPECT_EQ(code_of([] { from_real(std::numeric_limits<double>::infinity()); }),
            ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { from_real(std::nan("")); }), ErrorCode::InvalidInput);
}

TEST(Mul, Examples) {
  expect_scaled(mul(sr(1, 10, 1.5), sr(-1, 5, 1.2)), -1, 15, 1.8);
  EXPECT_TRUE(mul(sr(1, 10, 1.5), ScaledReal::zero()).is_zero());
  EXPECT_TRUE(mul(ScaledReal::zero(), sr(-1, -40, 1.25)).is_zero());
  expect_scaled(mul(sr(1, 0, 1.5), sr(1, 0, 1.5)), 1, 1, 1.125);
}

TEST(Mul, ExponentOverflow) {
  const auto big = sr(1, ScaledReal::kMaxExponent - 1, 1.5);
  EXPECT_EQ(code_of([&] { mul(big, big); }), ErrorCode::ExponentOverflow);
}

TEST(Add, Examples) {
  expect_scaled(add(sr(1, 100, 1.0), sr(1, 0, 1.0)), 1, 100, 1.0);
  EXPECT_TRUE(add(sr(1, 3, 1.0), sr(-1, 3, 1.0)).is_zero());
  expect_scaled(add(sr(1, 1, 1.5), sr(1, 0, 1.0)), 1, 2, 1.0);
}

TEST(Add, MatchesNativeInNormalRange) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-60, 60);
  for (int i = 0; i < 20000; ++i) {
    const double a = std::ldexp(mant(gen), ex(gen));
    const double b = std::ldexp(mant(gen), ex(gen));
    EXPECT_EQ(to_real(add(from_real(a), from_real(b))), a + b) << a << " + " << b;
  }
}

TEST(Properties, RoundTrip) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> mant(-2.0, 2.0);
  std::uniform_int_distribution<int> ex(-1000, 1000);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::ldexp(mant(gen), ex(gen));
    EXPECT_EQ(to_real(from_real(x)), x);
  }
}

TEST(Properties, SignAlgebraAndLogAdditivity) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<std::int64_t> ex(-1'000'000, 1'000'000);
  std::uniform_int_distribution<int> sg(-1, 1);
  for (int i = 0; i < 20000; ++i) {
    const int sa = sg(gen);
    const int sb = sg(gen);
    const auto a = sa == 0 ? ScaledReal::zero() : sr(sa, ex(gen), mant(gen));
    const auto b = sb == 0 ? ScaledReal::zero() : sr(sb, ex(gen), mant(gen));
    const auto p = mul(a, b);
    EXPECT_EQ(p.sign, sa * sb);
    if (sa != 0 && sb != 0) {
      const double expect = log_abs(a) + log_abs(b);
      EXPECT_NEAR(log_abs(p), expect, 1e-12 * std::max(1.0, std::fabs(expect)));
    }
  }
}

TEST(Properties, AddCommutesAndHasIdentity) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<std::int64_t> ex(-200, 200);
  std::bernoulli_distribution neg(0.5);
  for (int i = 0; i < 20000; ++i) {
    const auto a = sr(neg(gen) ? -1 : 1, ex(gen), mant(gen));
    const auto b = sr(neg(gen) ? -1 : 1, ex(gen), mant(gen));
    EXPECT_EQ(add(a, b), add(b, a));
    EXPECT_EQ(add(a, ScaledReal::zero()), a);
    EXPECT_EQ(add(ScaledReal::zero(), a), a);
  }
}

TEST(Properties, SignedPowOneIsValue) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> mant(-2.0, 2.0);
  std::uniform_int_distribution<int> ex(-1000, 1000);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::ldexp(mant(gen), ex(gen));
    const double got = signed_pow(from_real(x), 1.0);
    EXPECT_LE(std::fabs(got - x), std::fabs(std::nextafter(x, 0.0) - x)) << x;
  }
}

TEST(SignedPow, Examples) {
  EXPECT_NEAR(signed_pow(from_real(-8.0), 1.0 / 3.0), -2.0, 1e-15);
  EXPECT_EQ(signed_pow(from_real(-123.5), 0.0), -1.0);
  EXPECT_EQ(signed_pow(from_real(0.75), 0.0), 1.0);
  EXPECT_EQ(signed_pow(ScaledReal::zero(), 0.5), 0.0);
  // e^4 to 30 digits: 54.5981500331442390781102612029
  EXPECT_NEAR(signed_pow(from_log(1, 400.0), 0.01), 54.598150033144239, 1e-12 * 54.6);
}

TEST(SignedPow, RangeError) {
  EXPECT_EQ(code_of([] { signed_pow(sr(1, 2000, 1.0), 1.0); }), ErrorCode::RangeError);
}

TEST(LogAbs, Examples) {
  EXPECT_EQ(log_abs(sr(1, 0, 1.0)), 0.0);
  EXPECT_NEAR(log_abs(sr(-1, 3, 1.0)), std::log(8.0), 1e-15);
  EXPECT_NEAR(log_abs(sr(1, 1000, 1.0)), 1000.0 * std::numbers::ln2, 1e-10);
  EXPECT_EQ(code_of([] { log_abs(ScaledReal::zero()); }), ErrorCode::DomainError);
}

TEST(ToReal, Examples) {
  EXPECT_EQ(to_real(sr(1, 1, 1.5)), 3.0);
  EXPECT_EQ(to_real(ScaledReal::zero()), 0.0);
  EXPECT_EQ(code_of([] { to_real(sr(1, 2000, 1.0)); }), ErrorCode::RangeError);
}

TEST(FromLog, LargeMagnitudes) {
  const auto a = from_log(-1, 5000.0);
  EXPECT_EQ(a.sign, -1);
  EXPECT_NEAR(log_abs(a), 5000.0, 1e-9);
  EXPECT_NEAR(to_real(from_log(1, 2.0)), std::exp(2.0), 1e-14 * std::exp(2.0));
}

TEST(Less, TotalOrder) {
  const ScaledReal values[] = {from_real(-1e300), from_log(-1, 1.0), from_real(-1e-300),
                               ScaledReal::zero(), from_real(1e-300), from_real(1.0),
                               from_log(1, 900.0)};
  for (std::size_t i = 0; i < std::size(values); ++i) {
    for (std::size_t j = 0; j < std::size(values); ++j) {
      EXPECT_EQ(less(values[i], values[j]), i < j) << i << " " << j;
    }
  }
}

}  // namespace
}  // namespace perp
