#include <benchmark/benchmark.h>

#include "wbft/scenario.hpp"
#include "wbft/simulation.hpp"

namespace {

wbft::ScenarioInstance make_instance(wbft::ConsensusMode mode, std::uint64_t seed) {
    std::string nodes = "[";
    for (int i = 0; i < 10; ++i) {
        if (i) nodes += ",";
        nodes += R"({"quality_mean": 80, "quality_stddev": 0})";
    }
    nodes += "]";
    std::string text = R"({"name": "bench", "nodes": )" + nodes + R"(,
        "trust": {"mean": 0.1, "variance": 0.6},
        "byzantine": {"count": 3, "assignment": "lowest-trust"},
        "channel": {"slot_seconds": 0.005, "force_pl": 0.9},
        "workload": {"requests": 50}})";
    wbft::ScenarioConfig cfg = wbft::parse_config(text, false);
    cfg.consensus.mode = mode;
    cfg.seeds = {seed};
    return wbft::expand_config(cfg).front();
}

} // namespace

static void bm_scenario_wbft(benchmark::State& state) {
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::run_simulation(make_instance(wbft::ConsensusMode::wbft, seed++)));
    }
    state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(bm_scenario_wbft)->Unit(benchmark::kMillisecond);

static void bm_scenario_pbft(benchmark::State& state) {
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::run_simulation(make_instance(wbft::ConsensusMode::pbft, seed++)));
    }
    state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(bm_scenario_pbft)->Unit(benchmark::kMillisecond);
