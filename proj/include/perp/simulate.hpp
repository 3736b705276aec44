#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perp/model.hpp"
#include "perp/scaled.hpp"

namespace perp {

struct Checkpoint {
  std::uint64_t n = 0;
  ScaledReal r;
  /// ln W_n = max_{k<=n} (ln Q_k + sum_{j<k} ln M_j), when tracked.
  std::optional<double> w_log;
};

struct Trajectory {
  std::vector<Checkpoint> checkpoints;
  std::uint64_t seed = 0;
};

/// Iterates R_n = Q_n + M_n R_{n-1} from R_0 = 0 and records R at each
/// checkpoint. Same seed, same trajectory, bit for bit.
///
/// `track_running_max` requires Q > 0 and M > 0 (the Case III models).
Trajectory run_trajectory(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                          std::uint64_t seed, bool track_running_max = false);

/// N trajectories at a common set of checkpoints. `values[c][i]` is R at
/// checkpoint c of trajectory i; trajectory i is seeded with
/// derive_seed(master_seed, i).
struct BatchResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::vector<ScaledReal>> values;
  std::vector<std::vector<double>> w_log;  // empty unless tracked
  std::uint64_t master_seed = 0;
};

/// OpenMP kernel. Output is independent of `workers` (<= 0 means the OpenMP
/// default). A failing trajectory is rethrown with its index.
BatchResult run_batch(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                      std::size_t count, std::uint64_t master_seed, int workers,
                      bool track_running_max = false);

/// Single-threaded reference for run_batch; kept for tests and benchmarks.
BatchResult run_batch_serial(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                             std::size_t count, std::uint64_t master_seed,
                             bool track_running_max = false);

struct ValueAtom {
  double value = 0.0;
  double prob = 0.0;
};

struct ExactDistribution {
  std::vector<ValueAtom> atoms;  // sorted by value, merged within kMergeSpacing

  double cdf(double x) const;
  double mean() const;
  double variance() const;
};

inline constexpr double kMergeSpacing = 1e-12;
inline constexpr double kEnumerationGuard = 1e7;

/// Exact law of R_n for a DiscreteJoint model by enumerating all s^n paths.
/// Throws TooLarge when s^n > kEnumerationGuard and InvalidModel for other
/// families.
ExactDistribution enumerate_exact(const PairModel& model, unsigned n);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of R_n for |M| = 1 from
///   m_n = EQ + EM m_{n-1},  s_n = EQ^2 + 2 E(QM) m_{n-1} + s_{n-1}.
/// Throws DomainError unless the model is in Case IV.
MeanVariance exact_moments_recursion(const PairModel& model, std::uint64_t n);

void validate_checkpoints(std::span<const std::uint64_t> checkpoints);

}  // namespace perp
