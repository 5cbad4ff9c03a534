#include <benchmark/benchmark.h>

#include "coldcc/experiments.hpp"
#include "coldcc/propagator.hpp"

using namespace coldcc;

namespace {

const experiments::Model& rigid_model() {
  static const auto model = experiments::build_model({});
  return model;
}

}  // namespace

static void BM_PropagateBlock(benchmark::State& state) {
  const auto& model = rigid_model();
  const int jtot = static_cast<int>(state.range(0));
  const auto& W = model.problem->block(jtot, channels::Parity::even);
  const auto grid = model.setup.scattering.grid;
  for (auto _ : state) benchmark::DoNotOptimize(propagator::propagate(W, grid, 1e-3));
  state.counters["channels"] = W.size();
}
BENCHMARK(BM_PropagateBlock)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_SolveEnergy(benchmark::State& state) {
  const auto& model = rigid_model();
  const scatter::StateRef entrance{};
  for (auto _ : state) benchmark::DoNotOptimize(model.problem->solve(1e-3, entrance, {}));
}
BENCHMARK(BM_SolveEnergy)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
