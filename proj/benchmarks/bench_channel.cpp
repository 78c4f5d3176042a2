#include <benchmark/benchmark.h>

#include "wbft/channel.hpp"

static void bm_channel_success(benchmark::State& state) {
    wbft::ChannelParams p{15000.0, 15000.0, 10000.0, 1.0, 0.005};
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::channel_success_prob(p));
    }
}
BENCHMARK(bm_channel_success);

static void bm_channel_solve(benchmark::State& state) {
    wbft::ChannelParams p{15000.0, 15000.0, 10000.0, 1.0, 0.005};
    double target = 0.6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::solve_channel_latency(target, p));
        target += 0.01;
        if (target > 0.95) target = 0.6;
    }
}
BENCHMARK(bm_channel_solve);
