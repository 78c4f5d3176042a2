#include "wbft/analysis.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

#include "wbft/channel.hpp"
#include "wbft/normal.hpp"
#include "wbft/rng.hpp"

namespace wbft {

void SecurityModelParams::validate() const {
    if (n < 2) throw std::invalid_argument("security model: n >= 2 required");
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("security model: p in (0,1)");
    if (sigma2 <= 0.0) throw std::invalid_argument("security model: sigma2 > 0");
    if (std::fabs(mu - 1.0 / double(n)) > 1e-12)
        throw std::invalid_argument("security model: mu must equal 1/n");
}

double event_y(const CompositeWeights& weights, const std::map<NodeId, std::uint8_t>& votes) {
    double y = 0.0;
    for (const auto& [id, v] : votes)
        if (v == 1) y += weights.at(id);
    return y;
}

double analytic_security(const SecurityModelParams& params) {
    params.validate();
    double variance = double(params.n) * params.p * params.sigma2 +
                      params.p * (1.0 - params.p) / double(params.n);
    double z = (kQuorumThreshold - params.p) / std::sqrt(variance);
    return 1.0 - normal_cdf(z);
}

namespace {

std::uint64_t mc_hits(const SecurityModelParams& params, WeightSamplingRule rule,
                      std::uint64_t trials, std::uint64_t shard_seed) {
    SplitMix rng(shard_seed);
    const double sd = std::sqrt(params.sigma2);
    std::uint64_t hits = 0;
    std::vector<double> weights(params.n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        if (rule == WeightSamplingRule::iid) {
            for (auto& w : weights) w = rng.normal(params.mu, sd);
        } else {
            double sum = 0.0;
            for (auto& w : weights) {
                do {
                    w = rng.normal(params.mu, sd);
                } while (w <= 0.0 || w >= 1.0);
                sum += w;
            }
            for (auto& w : weights) w /= sum;
        }
        double y = 0.0;
        for (const double w : weights)
            if (rng.uniform() < params.p) y += w;
        if (y > kQuorumThreshold) ++hits;
    }
    return hits;
}

} // namespace

McEstimate mc_security(const SecurityModelParams& params, WeightSamplingRule rule,
                       std::uint64_t trials, std::uint64_t seed, int threads) {
    params.validate();
    if (trials == 0) throw std::invalid_argument("mc_security: trials > 0 required");

    // Fixed shard layout: the estimate depends only on (params, trials, seed),
    // not on how many worker threads execute the shards.
    constexpr std::uint64_t kShards = 16;
    std::uint64_t per_shard = trials / kShards;
    std::uint64_t remainder = trials % kShards;

    int workers = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> shards; // (seed, trials)
    RandomField field(seed);
    for (std::uint64_t s = 0; s < kShards; ++s) {
        std::uint64_t count = per_shard + (s < remainder ? 1 : 0);
        if (count == 0) continue;
        shards.emplace_back(field.stream(rng_tag("mc-shard"), s), count);
    }

    std::uint64_t hits = 0;
    if (workers == 1 || shards.size() == 1) {
        for (const auto& [shard_seed, count] : shards)
            hits += mc_hits(params, rule, count, shard_seed);
    } else {
        std::vector<std::future<std::uint64_t>> futures;
        for (const auto& [shard_seed, count] : shards)
            futures.push_back(std::async(std::launch::async, mc_hits, params, rule, count,
                                         shard_seed));
        for (auto& f : futures) hits += f.get();
    }

    McEstimate out;
    out.trials = trials;
    out.estimate = double(hits) / double(trials);
    out.stderr_ = std::sqrt(std::max(out.estimate * (1.0 - out.estimate), 0.0) /
                            double(trials));
    return out;
}

double liveness_success(std::uint32_t f, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("liveness_success: k >= 1 required");
    if (f == 0) return 1.0;
    double ratio = double(f) / double(3 * f + 1);
    return 1.0 - std::pow(ratio, double(k));
}

double expected_latency(std::uint32_t participants, double slot_seconds,
                        double attempt_success_q, double backoff_base_seconds,
                        std::uint32_t retry_cap) {
    if (attempt_success_q <= 0.0 || attempt_success_q > 1.0)
        throw std::invalid_argument("expected_latency: q in (0,1]");
    double base = phase_latency(participants, slot_seconds) / attempt_success_q;
    if (backoff_base_seconds <= 0.0 || attempt_success_q >= 1.0) return base;
    // sum_{j=1..cap} (2(1-q))^j, the expected doubling backoff while failing.
    double x = 2.0 * (1.0 - attempt_success_q);
    double sum = 0.0;
    if (std::fabs(x - 1.0) < 1e-12) {
        sum = double(retry_cap);
    } else {
        sum = x * (1.0 - std::pow(x, double(retry_cap))) / (1.0 - x);
    }
    return base + backoff_base_seconds * sum;
}

MetricsRecord aggregate(const ScenarioResult& result) {
    if (result.records.empty()) throw std::invalid_argument("aggregate: empty record stream");
    MetricsRecord out;
    out.scenario_id = result.scenario_id;
    out.mode = result.mode;
    out.seed = result.seed;
    out.p_l = result.p_l;
    out.requests = result.records.size();

    double latency_sum = 0.0;
    double attempts_sum = 0.0;
    double messages_sum = 0.0;
    for (const RoundRecord& rec : result.records) {
        if (rec.success) {
            ++out.commits;
            latency_sum += double(rec.latency_ticks) * result.tick_seconds;
        }
        attempts_sum += double(rec.attempts);
        messages_sum += double(rec.messages);
    }
    out.success_rate = double(out.commits) / double(out.requests);
    if (out.commits > 0) out.mean_latency_seconds = latency_sum / double(out.commits);
    out.mean_attempts = attempts_sum / double(out.requests);
    out.messages_per_round = messages_sum / double(out.requests);
    out.makespan_seconds = double(result.makespan_ticks) * result.tick_seconds;
    if (out.makespan_seconds > 0.0)
        out.throughput_tps = double(out.commits) / out.makespan_seconds;
    return out;
}

} // namespace wbft
