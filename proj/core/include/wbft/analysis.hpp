#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wbft/consensus.hpp"
#include "wbft/simulation.hpp"
#include "wbft/weights.hpp"

namespace wbft {

struct SecurityModelParams {
    std::uint32_t n = 10;
    double mu = 0.1;     // mean weight, 1/n
    double sigma2 = 0.2; // weight variance
    double p = 0.8;      // per-voter affirmative probability

    void validate() const;
};

// Weighted affirmative vote sum (Event Y).
double event_y(const CompositeWeights& weights, const std::map<NodeId, std::uint8_t>& votes);

// Normal-approximation consensus success probability:
//   1 - Phi((2/3 - p) / sqrt(n p sigma^2 + p (1 - p) / n)).
double analytic_security(const SecurityModelParams& params);

enum class WeightSamplingRule {
    iid,                   // weights i.i.d. normal(mu, sigma^2), unnormalized
    truncated_renormalized // rejected outside (0,1), then normalized to sum 1
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
};

// Monte Carlo estimate of P(Y > 2/3) under the chosen weight sampling rule;
// votes are Bernoulli(p). Deterministic given the seed. Trials may be sharded
// across threads; the result is independent of the shard count.
McEstimate mc_security(const SecurityModelParams& params, WeightSamplingRule rule,
                       std::uint64_t trials, std::uint64_t seed, int threads = 0);

// Closed-form retry success: 1 - (f / (3f + 1))^k.
double liveness_success(std::uint32_t f, std::uint32_t k);

// Closed-form expected latency with geometric retries: 2 n T / q plus the
// capped expected exponential backoff sum delta * sum_{j=1..cap} (2(1-q))^j.
double expected_latency(std::uint32_t participants, double slot_seconds,
                        double attempt_success_q, double backoff_base_seconds = 0.0,
                        std::uint32_t retry_cap = 16);

struct MetricsRecord {
    std::string scenario_id;
    ConsensusMode mode = ConsensusMode::wbft;
    std::uint64_t seed = 0;
    double p_l = 1.0;
    std::uint64_t requests = 0;
    std::uint64_t commits = 0;
    double success_rate = 0.0;
    std::optional<double> mean_latency_seconds; // absent when nothing committed
    double throughput_tps = 0.0;
    double mean_attempts = 0.0;
    double messages_per_round = 0.0;
    double makespan_seconds = 0.0;
};

// Aggregates one scenario's record stream. Throws on an empty stream.
MetricsRecord aggregate(const ScenarioResult& result);

} // namespace wbft
