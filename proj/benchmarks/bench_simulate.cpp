#include "ldp/simulate.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_SampleChain(benchmark::State& state) {
  auto spec = ldp::builtin_symmetric_walk(1, 1.0 / state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto traj = ldp::sample_chain(spec, seed++);
    benchmark::DoNotOptimize(traj.states.back());
  }
}
BENCHMARK(BM_SampleChain)->Arg(100)->Arg(400);

void BM_TubeDirect(benchmark::State& state) {
  auto spec = ldp::builtin_symmetric_walk(1, 1.0 / 100);
  auto center = ldp::straight_path({0.0}, {0.5}, 1.0, 1);
  for (auto _ : state) {
    auto est = ldp::tube_probability_mc(spec, center, 0.2, 1000, 7);
    benchmark::DoNotOptimize(est.p_hat);
  }
}
BENCHMARK(BM_TubeDirect);

void BM_TubeTilted(benchmark::State& state) {
  auto spec = ldp::builtin_symmetric_walk(1, 1.0 / 100);
  auto center = ldp::straight_path({0.0}, {0.5}, 1.0, 1);
  auto reference = ldp::straight_path({0.0}, {0.4}, 1.0, 1);
  auto sched = ldp::make_tilt_schedule(spec, reference);
  for (auto _ : state) {
    auto est = ldp::tube_probability_tilted(spec, center, 0.1, sched, 1000, 7);
    benchmark::DoNotOptimize(est.p_hat);
  }
}
BENCHMARK(BM_TubeTilted);

} // namespace

BENCHMARK_MAIN();
