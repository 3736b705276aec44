#include "perp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "perp/error.hpp"

namespace perp {

namespace {

void require_nonempty(std::span<const double> s, const char* what) {
  if (s.empty()) throw Error(ErrorCode::InvalidInput, what);
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

double order_statistic(std::span<const double> sorted, double level) {
  const auto n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(level * n - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

}  // namespace

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  require_nonempty(sorted_, "ECDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double level) const { return order_statistic(sorted_, level); }

double ks_one_sample(std::span<const double> samples, const CdfFunction& cdf) {
  require_nonempty(samples, "KS statistic of an empty sample");
  const std::vector<double> x = sorted_copy(samples);
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, std::fabs(above), std::fabs(below)});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "KS statistic of an empty sample");
  require_nonempty(b, "KS statistic of an empty sample");
  const std::vector<double> x = sorted_copy(a);
  const std::vector<double> y = sorted_copy(b);
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Once one side is exhausted the gap only shrinks toward 0.
  return d;
}

double dkw_bound(std::size_t n, double delta) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "DKW bound needs N >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidInput, "delta must be in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double cdf_quantile(const CdfFunction& cdf, double level) {
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 2100 && cdf(lo) >= level; ++i) lo *= 2.0;
  for (int i = 0; i < 2100 && cdf(hi) < level; ++i) hi *= 2.0;
  for (int i = 0; i < 400 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> samples,
                                                 const QqReference& reference, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidInput, "qq_points needs k >= 2");
  require_nonempty(samples, "qq_points of an empty sample");
  const std::vector<double> x = sorted_copy(samples);
  std::vector<double> ref_sorted;
  if (const auto* r = std::get_if<std::vector<double>>(&reference)) {
    require_nonempty(*r, "qq_points with an empty reference sample");
    ref_sorted = sorted_copy(*r);
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(k + 1);
    const double ref = ref_sorted.empty()
                           ? cdf_quantile(std::get<CdfFunction>(reference), level)
                           : order_statistic(ref_sorted, level);
    out.emplace_back(order_statistic(x, level), ref);
  }
  return out;
}

Summary summary(std::span<const double> samples) {
  require_nonempty(samples, "summary of an empty sample");
  Summary s;
  double mean = 0.0;
  double m2 = 0.0;
  s.min = samples.front();
  s.max = samples.front();
  std::size_t n = 0;
  std::size_t infinite = 0;
  for (const double x : samples) {
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    if (std::isinf(x)) {
      ++infinite;
      continue;
    }
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  s.count = samples.size();
  s.mean = mean;
  if (s.count >= 2) s.variance = n >= 2 ? m2 / static_cast<double>(n - 1) : 0.0;
  // Saturated samples: the moments are infinite, or undefined with both signs.
  if (infinite > 0) {
    const bool both = std::isinf(s.min) && std::isinf(s.max) && s.min < 0 && s.max > 0;
    s.mean = both ? std::nan("") : (std::isinf(s.max) && s.max > 0 ? HUGE_VAL : -HUGE_VAL);
    if (s.variance) s.variance = both ? std::nan("") : HUGE_VAL;
  }
  return s;
}

}  // namespace perp
