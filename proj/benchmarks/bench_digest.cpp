#include <benchmark/benchmark.h>

#include "wbft/digest.hpp"
#include "wbft/rng.hpp"

static void bm_sha256(benchmark::State& state) {
    wbft::Bytes data(std::size_t(state.range(0)));
    wbft::SplitMix rng(1);
    for (auto& c : data) c = std::uint8_t(rng.next());
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbft::digest(data));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_sha256)->Arg(64)->Arg(1024)->Arg(65536);
