#include <benchmark/benchmark.h>

#include "coldcc/angmom.hpp"

using namespace coldcc;

static void BM_Wigner3jUncached(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double s = 0.0;
    for (int m = -j; m <= j; ++m) s += angmom::wigner3j_uncached(j, j, 2, m, -m, 0);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Wigner3jUncached)->Arg(2)->Arg(8)->Arg(20);

static void BM_Wigner6jUncached(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(angmom::wigner6j_uncached(j, j, 2, j, j, j));
}
BENCHMARK(BM_Wigner6jUncached)->Arg(2)->Arg(8)->Arg(20);

// Repeated lookups after the first call fill the cache.
static void BM_Wigner3jCached(benchmark::State& state) {
  angmom::wigner3j(8, 8, 4, 1, -1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(angmom::wigner3j(8, 8, 4, 1, -1, 0));
}
BENCHMARK(BM_Wigner3jCached);

BENCHMARK_MAIN();
