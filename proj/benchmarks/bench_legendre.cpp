#include "ldp/legendre.hpp"
#include "ldp/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_LegendreTransformWalk(benchmark::State& state) {
  auto spec = ldp::builtin_symmetric_walk(static_cast<int>(state.range(0)));
  ldp::CounterRng rng(1);
  for (auto _ : state) {
    ldp::Vec vstar(spec.dimension());
    for (auto& c : vstar) c = 0.8 * (2 * rng.next_double() - 1) / spec.dimension();
    auto lp = ldp::legendre_transform(spec, ldp::EvalMode::Limit, 0.0,
                                      ldp::Vec(spec.dimension(), 0.0), vstar);
    benchmark::DoNotOptimize(lp.value);
  }
}
BENCHMARK(BM_LegendreTransformWalk)->Arg(1)->Arg(2)->Arg(3);

void BM_LegendreTransformCurieWeiss(benchmark::State& state) {
  auto spec = ldp::builtin_curie_weiss(1.5);
  ldp::CounterRng rng(2);
  for (auto _ : state) {
    double m = 0.8 * (2 * rng.next_double() - 1);
    double v = 1.8 * (2 * rng.next_double() - 1);
    auto lp = ldp::legendre_transform(spec, ldp::EvalMode::Limit, 0.0, {m}, {v});
    benchmark::DoNotOptimize(lp.value);
  }
}
BENCHMARK(BM_LegendreTransformCurieWeiss);

void BM_RegLegendre(benchmark::State& state) {
  auto spec = ldp::builtin_curie_weiss(1.5);
  for (auto _ : state) {
    double v = ldp::reg_legendre(spec, ldp::EvalMode::Limit, 0.5, {0.3}, {0.4}, 0.05,
                                 0.01);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_RegLegendre);

} // namespace

BENCHMARK_MAIN();
