#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "perp/error.hpp"
#include "perp/model.hpp"
#include "perp/simulate.hpp"

namespace perp::detail {

inline constexpr std::size_t kMaxInlineCheckpoints = 16;

/// Shared inner loop of every sampling entry point.
void simulate_into(const PairModel& model, std::span<const std::uint64_t> checkpoints,
                   std::uint64_t seed, bool track_running_max, std::span<ScaledReal> r_out,
                   std::span<double> w_out);

BatchResult make_batch(std::span<const std::uint64_t> checkpoints, std::size_t count,
                       std::uint64_t master_seed, bool track_running_max);

/// Runs trajectory i of `b` and stores its checkpoints in place.
void run_one(const PairModel& model, BatchResult& b, std::size_t i, bool track_running_max);

[[noreturn]] void rethrow_for_index(std::size_t index, const Error& e);

}  // namespace perp::detail
