// Serial reference vs OpenMP batch kernel on three representative models.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "perp/simulate.hpp"

namespace {

const perp::PairModel& model_for(int which) {
  static const perp::PairModel i_sym(perp::ScaledRademacher{2.0, 0.5, perp::RademacherQ{0.5}});
  static const perp::PairModel ii(perp::LogNormalPair{0.5, 1.0, perp::ConstantQ{1.0}});
  static const perp::PairModel iii(perp::LogNormalPair{0.0, 1.0, perp::LogNormalQ{0.0, 1.0}});
  switch (which) {
    case 0: return i_sym;
    case 1: return ii;
    default: return iii;
  }
}

const std::vector<std::uint64_t> kCheckpoints = {10, 100, 1000};
constexpr std::size_t kTrajectories = 2000;

void BM_Serial(benchmark::State& state) {
  const auto& model = model_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto b = perp::run_batch_serial(model, kCheckpoints, kTrajectories, 1);
    benchmark::DoNotOptimize(b.values.data());
  }
  state.SetItemsProcessed(state.iterations() * kTrajectories * kCheckpoints.back());
}

void BM_OpenMP(benchmark::State& state) {
  const auto& model = model_for(static_cast<int>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto b = perp::run_batch(model, kCheckpoints, kTrajectories, 1, workers);
    benchmark::DoNotOptimize(b.values.data());
  }
  state.SetItemsProcessed(state.iterations() * kTrajectories * kCheckpoints.back());
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)
    ->ArgsProduct({{0, 1, 2}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
