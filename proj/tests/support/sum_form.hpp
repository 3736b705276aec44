#pragma once

#include <cstdint>
#include <vector>

#include "perp/model.hpp"
#include "perp/random.hpp"
#include "perp/scaled.hpp"

namespace perp::testing {

/// R_n drawn as sum_{k<=n} Q_k prod_{j<k} M_j, the forward-iterated form.
/// Same draw order and seed derivation as run_batch, so with equal master
/// seeds the two forms see the same pairs in reverse order of use.
inline ScaledReal sum_form_value(const PairModel& model, std::uint64_t n, std::uint64_t seed) {
  Stream rng(seed);
  ScaledReal total = ScaledReal::zero();
  ScaledReal prefix = from_real(1.0);
  for (std::uint64_t k = 0; k < n; ++k) {
    const PairDraw d = model.sample(rng);
    total = add(total, mul(d.q, prefix));
    prefix = mul(prefix, d.m);
  }
  return total;
}

inline std::vector<ScaledReal> sum_form_batch(const PairModel& model, std::uint64_t n,
                                              std::size_t count, std::uint64_t master_seed) {
  std::vector<ScaledReal> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = sum_form_value(model, n, derive_seed(master_seed, i));
  }
  return out;
}

}  // namespace perp::testing
