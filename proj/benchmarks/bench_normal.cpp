#include <benchmark/benchmark.h>

#include "wbft/normal.hpp"

static void bm_normal_cdf(benchmark::State& state) {
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::normal_cdf(x));
        x += 0.001;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(bm_normal_cdf);
