#pragma once

#include <map>
#include <string>
#include <vector>

#include "wbft/block.hpp"
#include "wbft/consensus.hpp"
#include "wbft/netsim.hpp"
#include "wbft/scenario.hpp"

namespace wbft {

// One fully resolved run cell: config x mode x channel point x seed.
struct ScenarioInstance {
    std::string scenario_id;
    ScenarioConfig config;
    ConsensusMode mode = ConsensusMode::wbft;
    std::uint64_t seed = 1;
    double p_l = 1.0;        // link success probability in effect
    double slot_seconds = 0.005;
};

// Expands a config into instances (modes x channel grid x seeds). Solves T
// from target P_l points via the channel model.
std::vector<ScenarioInstance> expand_config(const ScenarioConfig& config);

struct RoundRecord {
    std::uint64_t request_idx = 0;
    NodeId leader{};
    std::uint32_t participants = 0;
    bool success = false;
    std::uint32_t attempts = 0;
    Ticks latency_ticks = 0;         // active consensus time, gate waits excluded
    std::uint64_t messages = 0;      // consensus messages across all attempts
    std::uint64_t max_attempt_messages = 0;
    Digest committed_digest{};
};

struct StoredProof {
    Proof proof;
    CompositeWeights weights;
};

struct ScenarioResult {
    std::string scenario_id;
    ConsensusMode mode = ConsensusMode::wbft;
    std::uint64_t seed = 0;
    double p_l = 1.0;
    double slot_seconds = 0.005;
    double tick_seconds = 1e-4;
    std::vector<RoundRecord> records;
    std::map<NodeId, LedgerSet> replicas; // one replica set per node
    std::vector<NodeId> byzantine_nodes;
    std::vector<StoredProof> proofs;      // kept when sim.retain_proofs is set
    Ticks makespan_ticks = 0;
    std::uint64_t total_messages = 0;     // consensus + dissemination + recovery

    bool is_byzantine(NodeId id) const;
};

// Runs one instance: the request -> generate -> consensus -> block ->
// chain-extension workflow under the selected mode, deterministic given
// (config, seed). End-of-run recovery fills replica gaps so honest replicas
// agree at quiescence.
ScenarioResult run_simulation(const ScenarioInstance& instance);

// Diagnostic snapshot of the clustering a given entry node would compute at
// round 0 (the `cluster` CLI subcommand).
struct HscSnapshot {
    std::uint32_t k = 0;
    double lambda = 0.0;
    std::map<NodeId, std::uint32_t> assignment;
    std::vector<NodeId> ccns;
    std::map<NodeId, double> trust;
    std::map<NodeId, double> latency_seconds;
};

HscSnapshot hsc_snapshot(const ScenarioInstance& instance, NodeId entry);

} // namespace wbft
