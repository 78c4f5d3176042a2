#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbft/consensus.hpp"
#include "wbft/hsc.hpp"
#include "wbft/ids.hpp"
#include "wbft/profile.hpp"
#include "wbft/weights.hpp"

namespace wbft {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodeSpec {
    std::string name;
    double quality_mean = 80.0;
    double quality_stddev = 5.0;
    std::optional<double> trust; // explicit trust overrides the distribution
    std::vector<ByzantineBehavior> behaviors;
};

enum class ByzantineAssignment { fixed, random, lowest_trust, highest_trust };

struct ByzantineConfig {
    std::uint32_t count = 0;
    ByzantineAssignment assignment = ByzantineAssignment::fixed;
    std::vector<ByzantineBehavior> behaviors = {
        ByzantineBehavior::bad_vote, ByzantineBehavior::invalid_proof,
        ByzantineBehavior::fake_response, ByzantineBehavior::silent};
    double activation_prob = 1.0;
    bool cycle = true;
    bool unsafe_allowed = false; // permit count > floor((n-1)/3)
};

struct TrustDistribution {
    double mean = 0.1;
    double variance = 0.2;
};

enum class RetryLeaderPolicy { same, next, random };

struct ConsensusConfig {
    ConsensusMode mode = ConsensusMode::wbft;
    double alpha = 0.5;
    double beta = 0.5;
    Ticks retry_base_ticks = 0; // 0 = one round trip (2 * slot)
    std::uint32_t retry_max = 16;
    bool pipeline = true;
    RetryLeaderPolicy leader_policy = RetryLeaderPolicy::next;
};

struct ChannelConfig {
    double bandwidth_hz = 15000.0;
    double capacity_bps = 15000.0;
    double rate_bps = 10000.0;
    double subcarriers = 1.0;
    std::optional<double> slot_seconds;  // T given directly
    std::optional<double> target_pl;     // or solved from a target P_l
    std::vector<double> pl_grid;         // or a sweep of targets
    std::optional<double> force_pl;      // overrides the computed success
                                         // probability (requires slot_seconds);
                                         // 1.0 models a lossless link
};

enum class EntryPolicy { round_robin, random, fixed };

struct WorkloadConfig {
    std::uint64_t requests = 100;
    EntryPolicy entry_policy = EntryPolicy::round_robin;
    NodeId fixed_entry{0};
};

struct SimConfig {
    double tick_seconds = 1e-4;
    double latency_jitter = 0.2;   // spread of measured per-link latency for HSC
    Ticks delivery_jitter_ticks = 0;
    bool retain_proofs = false;
    bool persist_ledgers = false;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<NodeSpec> nodes;
    TrustDistribution trust;
    ByzantineConfig byzantine;
    ConsensusConfig consensus;
    std::vector<ConsensusMode> modes; // empty = just consensus.mode
    HscParams hsc;
    RecalibrationParams recalibration;
    ChannelConfig channel;
    WorkloadConfig workload;
    SimConfig sim;
    std::vector<std::uint64_t> seeds = {1};

    std::uint32_t node_count() const { return std::uint32_t(nodes.size()); }
    void validate() const; // throws ValidationError naming the field
};

// Parses, applies defaults (logging each applied default to stderr when
// verbose), validates. Throws ValidationError with line info on parse errors.
ScenarioConfig load_config(const std::filesystem::path& path, bool verbose = true);
ScenarioConfig parse_config(const std::string& text, bool verbose = true);

// The ten Table-III profiles with their published average scores.
std::vector<NodeSpec> reference_nodes();

// Reads the delimiter-separated score file (header row of node names, one
// row per volunteer).
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

} // namespace wbft
