#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace perp {

using CdfFunction = std::function<double(double)>;

/// Right-continuous empirical distribution function.
class Ecdf {
 public:
  /// Throws InvalidInput for an empty sample.
  explicit Ecdf(std::vector<double> samples);

  /// (#samples <= x) / N
  double operator()(double x) const;

  /// Smallest order statistic x_(i) with i/N >= level.
  double quantile(double level) const;

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// sup_x |F_N(x) - F(x)|, evaluated at both sides of every jump.
double ks_one_sample(std::span<const double> samples, const CdfFunction& cdf);

/// sup_x |F_a(x) - F_b(x)| by a merge walk over the sorted samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sqrt(ln(2/delta) / (2N)): with probability >= 1 - delta the ECDF of N
/// draws stays within this sup-distance of the true CDF.
double dkw_bound(std::size_t n, double delta);

/// Either a CDF (quantiles by bisection, leftmost root on flat stretches) or
/// a reference sample (quantiles by order statistics).
using QqReference = std::variant<CdfFunction, std::vector<double>>;

/// k pairs (empirical quantile, reference quantile) at levels i/(k+1).
/// Throws InvalidInput for k < 2.
std::vector<std::pair<double, double>> qq_points(std::span<const double> samples,
                                                 const QqReference& reference, int k);

/// inf{x : F(x) >= level} by geometric bracketing and bisection.
double cdf_quantile(const CdfFunction& cdf, double level);

struct Summary {
  double mean = 0.0;
  std::optional<double> variance;  // unbiased; absent for N < 2
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// One-pass (Welford) summary. Infinite samples make the moments infinite
/// (NaN when both signs occur). Throws InvalidInput for an empty sample.
Summary summary(std::span<const double> samples);

}  // namespace perp
