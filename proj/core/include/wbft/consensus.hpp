#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "wbft/ids.hpp"
#include "wbft/netsim.hpp"
#include "wbft/profile.hpp"
#include "wbft/proof.hpp"
#include "wbft/weights.hpp"

namespace wbft {

enum class ConsensusMode {
    wbft,            // HSC CCNs, weighted quorums, pipelined parallel chains
    wbft_no_hsc,     // all nodes vote, weighted (the w/o HSC ablation)
    wbft_unweighted, // HSC CCNs, equal weights (the w/o Weighted ablation)
    pbft,            // all nodes, equal weights, all-to-all middle stage
    vaap,            // all nodes, equal weights, leader-centric two-phase
    abc_pbft,        // static top-trust subset chosen once, equal weights
};

const char* to_string(ConsensusMode mode);
std::optional<ConsensusMode> mode_from_string(std::string_view name);

bool mode_uses_hsc(ConsensusMode mode);
bool mode_weighted(ConsensusMode mode);
bool mode_parallel_chains(ConsensusMode mode);
bool mode_supports_pipeline(ConsensusMode mode);

enum class RoundPhase { preparing, committing, committed, failed };

// One pipelined consensus instance. Phases only move forward except the
// failed -> preparing retry transition.
struct RoundState {
    RoundPhase phase = RoundPhase::preparing;
    PreparePayload payload;
    std::vector<VoteMsg> votes;
    std::optional<Proof> proof;
    std::vector<CommitConfirm> confirms;
    std::uint32_t retry_count = 0;
    Ticks deadline = 0;
};

// Leader side of the prepare phase: generate the response, wrap and sign.
PreparePayload leader_prepare(const LlmProfile& leader, Bytes query, std::uint64_t round,
                              std::uint64_t height, double response_quality,
                              const CryptoScheme& scheme);

// Follower side: verify the wrapped payload; discard silently on failure,
// otherwise vote 1 iff the leader's response quality is at least as good as
// the follower's own.
std::optional<VoteMsg> follower_on_prepare(const PreparePayload& payload,
                                           const LlmProfile& voter, double own_quality,
                                           double leader_quality, const CryptoScheme& scheme,
                                           const KeyDirectory& keys);

// Leader tally of the prepare phase over the collected votes. Invalid or
// mismatched votes never count. nullopt = quorum failure (retry path).
std::optional<Proof> leader_tally_prepare(RoundState& state, const CompositeWeights& weights,
                                          double leader_weight, const CryptoScheme& scheme,
                                          const KeyDirectory& keys);

struct ConfirmOutcome {
    std::optional<CommitConfirm> confirm;
    bool leader_flagged = false;
};

// Follower side of the commit phase: verify the proof end to end; on success
// expunge the retained previous proof and confirm, on failure discard and
// flag the leader.
ConfirmOutcome follower_on_proof(const Proof& proof, const CompositeWeights& weights,
                                 const LlmProfile& voter, const CryptoScheme& scheme,
                                 const KeyDirectory& keys,
                                 std::optional<Proof>& retained_previous);

// Leader tally of the commit phase: weighted sum of c = 1 confirms plus the
// leader's own weight, strict 2/3.
bool leader_tally_commit(const std::vector<CommitConfirm>& confirms,
                         const CompositeWeights& weights, double leader_weight,
                         const CryptoScheme& scheme, const KeyDirectory& keys);

// Exponential retry backoff: base * 2^retry_count.
Ticks retry_backoff(Ticks base, std::uint32_t retry_count);

// Quorum failure path: increment the retry counter, extend the deadline by
// the exponential backoff and refresh the payload timestamp (repropose).
// Returns false when retries are exhausted.
bool retry_vote(RoundState& state, Ticks now, Ticks backoff_base, std::uint32_t retry_max);

// A holder's answer to GetData(hash).
struct TxOffer {
    NodeId holder{};
    Bytes payload;
    Signature signature; // over the response hash
};

TxOffer make_tx_offer(NodeId holder, Bytes payload, const SecretKey& follower_secret,
                      const CryptoScheme& scheme);

// Transaction recovery: accept the first offer whose payload digest matches
// the wanted hash and whose signature verifies; wrong payloads are rejected
// and the scan continues. nullopt when no holder can supply it.
std::optional<Bytes> recover_transaction(const Digest& wanted,
                                         const std::vector<TxOffer>& offers,
                                         const CryptoScheme& scheme, const KeyDirectory& keys);

// Equal 1/m weights over a participant set (the unweighted baselines).
CompositeWeights equal_weights(const std::vector<NodeId>& participants);

} // namespace wbft
