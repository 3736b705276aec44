#include "perp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perp/error.hpp"
#include "perp/random.hpp"
#include "simulate_detail.hpp"

namespace perp {

void validate_checkpoints(std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorCode::InvalidInput, "checkpoint list is empty");
  if (checkpoints.front() < 1) throw Error(ErrorCode::InvalidInput, "checkpoints start at n = 1");
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) {
      throw Error(ErrorCode::InvalidInput, "checkpoints must be strictly increasing");
    }
  }
}

namespace detail {

void simulate_into(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                   std::uint64_t seed, bool track_running_max, std::span<ScaledReal> r_out,
                   std::span<double> w_out) {
  Stream rng(seed);
  ScaledReal r = ScaledReal::zero();
  double log_prefix = 0.0;  // sum_{j<k} ln M_j
  double w_log = -HUGE_VAL;
  std::uint64_t n = 0;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (; n < checkpoints[c]; ++n) {
      const PairDraw d = model.sample(rng);
      if (track_running_max) {
        if (d.q.sign <= 0 || d.m.sign <= 0) {
          throw Error(ErrorCode::DomainError, "running maximum needs Q > 0 and M > 0");
        }
        w_log = std::max(w_log, log_abs(d.q) + log_prefix);
        log_prefix += log_abs(d.m);
      }
      r = add(d.q, mul(d.m, r));
    }
    r_out[c] = r;
    if (track_running_max) w_out[c] = w_log;
  }
}

}  // namespace detail

Trajectory run_trajectory(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                          std::uint64_t seed, bool track_running_max) {
  validate_checkpoints(checkpoints);
  std::vector<ScaledReal> r(checkpoints.size());
  std::vector<double> w(track_running_max ? checkpoints.size() : 0);
  detail::simulate_into(model, checkpoints, seed, track_running_max, r, w);
  Trajectory t;
  t.seed = seed;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    Checkpoint cp{checkpoints[c], r[c], std::nullopt};
    if (track_running_max) cp.w_log = w[c];
    t.checkpoints.push_back(cp);
  }
  return t;
}

namespace detail {

BatchResult make_batch(std::span<const std::uint64_t> checkpoints, std::size_t count,
                       std::uint64_t master_seed, bool track_running_max) {
  validate_checkpoints(checkpoints);
  if (count < 1) throw Error(ErrorCode::InvalidInput, "batch size must be at least 1");
  BatchResult b;
  b.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  b.master_seed = master_seed;
  b.values.assign(checkpoints.size(), std::vector<ScaledReal>(count));
  if (track_running_max) b.w_log.assign(checkpoints.size(), std::vector<double>(count));
  return b;
}

void run_one(const PairModel& model, BatchResult& b, std::size_t i, bool track_running_max) {
  const std::size_t k = b.checkpoints.size();
  ScaledReal r[kMaxInlineCheckpoints];
  double w[kMaxInlineCheckpoints];
  std::vector<ScaledReal> r_heap;
  std::vector<double> w_heap;
  std::span<ScaledReal> rs(r, std::min(k, kMaxInlineCheckpoints));
  std::span<double> ws(w, std::min(k, kMaxInlineCheckpoints));
  if (k > kMaxInlineCheckpoints) {
    r_heap.resize(k);
    w_heap.resize(k);
    rs = r_heap;
    ws = w_heap;
  }
  simulate_into(model, b.checkpoints, derive_seed(b.master_seed, i), track_running_max, rs, ws);
  for (std::size_t c = 0; c < k; ++c) {
    b.values[c][i] = rs[c];
    if (track_running_max) b.w_log[c][i] = ws[c];
  }
}

[[noreturn]] void rethrow_for_index(std::size_t index, const Error& e) {
  std::ostringstream os;
  os << "trajectory " << index << " failed: " << e.what();
  throw Error(e.code(), os.str());
}

}  // namespace detail

BatchResult run_batch_serial(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                             std::size_t count, std::uint64_t master_seed,
                             bool track_running_max) {
  BatchResult b = detail::make_batch(checkpoints, count, master_seed, track_running_max);
  for (std::size_t i = 0; i < count; ++i) {
    try {
      detail::run_one(model, b, i, track_running_max);
    } catch (const Error& e) {
      detail::rethrow_for_index(i, e);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------

double ExactDistribution::cdf(double x) const {
  double acc = 0.0;
  for (const auto& a : atoms) {
    if (a.value > x) break;
    acc += a.prob;
  }
  return std::min(acc, 1.0);
}

double ExactDistribution::mean() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.prob * a.value;
  return m;
}

double ExactDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& a : atoms) v += a.prob * (a.value - m) * (a.value - m);
  return v;
}

namespace {

void enumerate_paths(const std::vector<JointAtom>& atoms, unsigned remaining, double r, double prob,
                     std::vector<ValueAtom>& out) {
  if (remaining == 0) {
    out.push_back({r, prob});
    return;
  }
  for (const auto& a : atoms) {
    enumerate_paths(atoms, remaining - 1, a.q + a.m * r, prob * a.prob, out);
  }
}

}  // namespace

ExactDistribution enumerate_exact(const PairModel& model, unsigned n) {
  const auto* d = std::get_if<DiscreteJoint>(&model.family());
  if (!d) throw Error(ErrorCode::InvalidModel, "exact enumeration needs a DiscreteJoint model");
  if (n < 1) throw Error(ErrorCode::InvalidInput, "enumeration needs n >= 1");
  std::vector<JointAtom> support;
  for (const auto& a : d->atoms) {
    if (a.prob > 0.0) support.push_back(a);
  }
  const double paths = std::pow(static_cast<double>(support.size()), static_cast<double>(n));
  if (paths > kEnumerationGuard) {
    std::ostringstream os;
    os << support.size() << "^" << n << " paths exceed the enumeration guard of "
       << kEnumerationGuard;
    throw Error(ErrorCode::TooLarge, os.str());
  }
  std::vector<ValueAtom> all;
  all.reserve(static_cast<std::size_t>(paths));
  enumerate_paths(support, n, 0.0, 1.0, all);
  std::sort(all.begin(), all.end(),
            [](const ValueAtom& a, const ValueAtom& b) { return a.value < b.value; });

  ExactDistribution out;
  for (const auto& a : all) {
    if (!out.atoms.empty() && a.value - out.atoms.back().value <= kMergeSpacing) {
      out.atoms.back().prob += a.prob;
    } else {
      out.atoms.push_back(a);
    }
  }
  return out;
}

MeanVariance exact_moments_recursion(const PairModel& model, std::uint64_t n) {
  const Moments mo = analytic_moments(model);
  RegimeReport regime;
  try {
    regime = classify(mo, model);
  } catch (const Error& e) {
    throw Error(ErrorCode::DomainError, std::string("moment recursion needs a Case IV model: ") +
                                            e.what());
  }
  if (regime.case_id != CaseId::IV) {
    throw Error(ErrorCode::DomainError, "moment recursion needs a Case IV model (|M| = 1)");
  }
  if (n < 1) throw Error(ErrorCode::InvalidInput, "moment recursion needs n >= 1");
  double m = 0.0;  // E R_k
  double s = 0.0;  // E R_k^2
  for (std::uint64_t k = 0; k < n; ++k) {
    s = mo.mean_Q2 + 2.0 * mo.mean_QM * m + s;
    m = mo.mean_Q + mo.mean_M * m;
  }
  return {m, s - m * m};
}

}  // namespace perp
