#include <benchmark/benchmark.h>

#include "wbft/hsc.hpp"
#include "wbft/rng.hpp"

static void bm_run_hsc(benchmark::State& state) {
    wbft::SplitMix rng(7);
    std::map<wbft::NodeId, double> trust, latency;
    for (std::uint32_t i = 0; i < std::uint32_t(state.range(0)); ++i) {
        trust[wbft::NodeId{i}] = 0.05 + 0.9 * rng.uniform();
        latency[wbft::NodeId{i}] = 0.001 + 0.01 * rng.uniform();
    }
    wbft::HscParams params;
    params.k_max = std::min<std::uint32_t>(6, std::uint32_t(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::run_hsc(trust, latency, params, seed++));
    }
}
BENCHMARK(bm_run_hsc)->Arg(10)->Arg(40);
