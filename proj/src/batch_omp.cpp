#include <omp.h>

#include <limits>
#include <optional>

#include "perp/simulate.hpp"
#include "simulate_detail.hpp"

namespace perp {

BatchResult run_batch(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                      std::size_t count, std::uint64_t master_seed, int workers,
                      bool track_running_max) {
  BatchResult b = detail::make_batch(checkpoints, count, master_seed, track_running_max);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(count);

  // Exceptions cannot leave the parallel region; keep the lowest failing
  // index so the reported error does not depend on scheduling.
  std::size_t failed = std::numeric_limits<std::size_t>::max();
  std::optional<Error> failure;

#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      detail::run_one(model, b, static_cast<std::size_t>(i), track_running_max);
    } catch (const Error& e) {
#pragma omp critical(perp_batch_failure)
      {
        if (static_cast<std::size_t>(i) < failed) {
          failed = static_cast<std::size_t>(i);
          failure.emplace(e);
        }
      }
    }
  }
  if (failure) detail::rethrow_for_index(failed, *failure);
  return b;
}

}  // namespace perp
