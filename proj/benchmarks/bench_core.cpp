#include <benchmark/benchmark.h>

#include <random>

#include "oppsched/region.hpp"
#include "oppsched/sim.hpp"

namespace {

using namespace oppsched;

// n states with k options each in R^m, coordinates in [0, 1).
Model grid_model(std::size_t n, std::size_t k, std::size_t m) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  Model model;
  model.m = m;
  for (std::size_t s = 0; s < n; ++s) {
    State st{"s" + std::to_string(s), 1.0 / static_cast<double>(n), {}, 0.0};
    for (std::size_t i = 0; i < k; ++i) {
      Vec v(m);
      for (double& c : v) c = u(rng);
      st.options.push_back(v);
    }
    model.states.push_back(st);
  }
  double total = 0.0;
  for (const auto& st : model.states) total += st.prob;
  model.states.back().prob += 1.0 - total;
  return model;
}

void BM_Lmo(benchmark::State& state) {
  const RateRegion r(grid_model(static_cast<std::size_t>(state.range(0)), 8, 4));
  const Vec d{0.3, -0.2, 0.7, -0.1};
  for (auto _ : state) benchmark::DoNotOptimize(lmo(r, d));
}
BENCHMARK(BM_Lmo)->Arg(4)->Arg(64)->Arg(1024);

void BM_Project(benchmark::State& state) {
  const RateRegion r(grid_model(static_cast<std::size_t>(state.range(0)), 8, 3));
  const Vec x{2.0, 2.0, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(membership(r, x));
}
BENCHMARK(BM_Project)->Arg(4)->Arg(64);

void BM_Decompose(benchmark::State& state) {
  const RateRegion r(grid_model(16, 8, 3));
  const Vec x{0.5, 0.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(decompose(r, x));
}
BENCHMARK(BM_Decompose);

void BM_SlotUniform(benchmark::State& state) {
  const RandSource src(42);
  std::uint64_t k = 1;
  for (auto _ : state) benchmark::DoNotOptimize(slot_uniform(src, k++ % 100000 + 1));
}
BENCHMARK(BM_SlotUniform);

void BM_RunTarget(benchmark::State& state) {
  const RateRegion r(grid_model(4, 4, 2));
  const Policy p = target_policy(r, lmo(r, Vec{0.0, 0.0}));
  const auto horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(r.model(), p, horizon, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTarget)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RunMaxWeight(benchmark::State& state) {
  const RateRegion r(grid_model(4, 4, 2));
  RunOptions opts;
  opts.arrivals = DeterministicArrivals{{0.2, 0.2}};
  for (auto _ : state) benchmark::DoNotOptimize(run(r.model(), MaxWeightPolicy{}, 100000, 7, opts));
}
BENCHMARK(BM_RunMaxWeight)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
