#include "wbft/consensus.hpp"

#include <stdexcept>

namespace wbft {

const char* to_string(ConsensusMode mode) {
    switch (mode) {
        case ConsensusMode::wbft: return "wbft";
        case ConsensusMode::wbft_no_hsc: return "wbft-no-hsc";
        case ConsensusMode::wbft_unweighted: return "wbft-unweighted";
        case ConsensusMode::pbft: return "pbft";
        case ConsensusMode::vaap: return "vaap";
        case ConsensusMode::abc_pbft: return "abc-pbft";
    }
    return "?";
}

std::optional<ConsensusMode> mode_from_string(std::string_view name) {
    if (name == "wbft") return ConsensusMode::wbft;
    if (name == "wbft-no-hsc" || name == "no-hsc") return ConsensusMode::wbft_no_hsc;
    if (name == "wbft-unweighted" || name == "unweighted") return ConsensusMode::wbft_unweighted;
    if (name == "pbft") return ConsensusMode::pbft;
    if (name == "vaap") return ConsensusMode::vaap;
    if (name == "abc-pbft" || name == "abc") return ConsensusMode::abc_pbft;
    return std::nullopt;
}

bool mode_uses_hsc(ConsensusMode mode) {
    return mode == ConsensusMode::wbft || mode == ConsensusMode::wbft_unweighted;
}

bool mode_weighted(ConsensusMode mode) {
    return mode == ConsensusMode::wbft || mode == ConsensusMode::wbft_no_hsc;
}

bool mode_parallel_chains(ConsensusMode mode) {
    return mode == ConsensusMode::wbft || mode == ConsensusMode::wbft_no_hsc ||
           mode == ConsensusMode::wbft_unweighted || mode == ConsensusMode::vaap;
}

bool mode_supports_pipeline(ConsensusMode mode) {
    return mode == ConsensusMode::wbft || mode == ConsensusMode::wbft_no_hsc ||
           mode == ConsensusMode::wbft_unweighted;
}

PreparePayload leader_prepare(const LlmProfile& leader, Bytes query, std::uint64_t round,
                              std::uint64_t height, double response_quality,
                              const CryptoScheme& scheme) {
    Bytes response = generate_response(leader.node, round, response_quality);
    return make_prepare(leader.node, round, height, std::move(query), std::move(response),
                        leader.keys.leader.sec, scheme);
}

std::optional<VoteMsg> follower_on_prepare(const PreparePayload& payload,
                                           const LlmProfile& voter, double own_quality,
                                           double leader_quality, const CryptoScheme& scheme,
                                           const KeyDirectory& keys) {
    if (!verify_prepare(payload, scheme, keys)) return std::nullopt;
    std::uint8_t value = (own_quality <= leader_quality) ? 1 : 0;
    Bytes own_response = generate_response(voter.node, payload.round, own_quality);
    return make_vote(voter.node, payload, value, std::move(own_response),
                     voter.keys.follower.sec, scheme);
}

std::optional<Proof> leader_tally_prepare(RoundState& state, const CompositeWeights& weights,
                                          double leader_weight, const CryptoScheme& scheme,
                                          const KeyDirectory& keys) {
    auto proof = make_proof(state.votes, weights, leader_weight, scheme, keys);
    if (proof) {
        state.proof = proof;
        state.phase = RoundPhase::committing;
    }
    return proof;
}

ConfirmOutcome follower_on_proof(const Proof& proof, const CompositeWeights& weights,
                                 const LlmProfile& voter, const CryptoScheme& scheme,
                                 const KeyDirectory& keys,
                                 std::optional<Proof>& retained_previous) {
    ConfirmOutcome out;
    if (!verify_proof(proof, weights, scheme, keys)) {
        out.leader_flagged = true;
        return out;
    }
    retained_previous.reset(); // storage bound: drop the previous height's proof
    out.confirm = make_confirm(voter.node, proof.leader, proof.height, proof.round, 1,
                               voter.keys.follower.sec, scheme);
    return out;
}

bool leader_tally_commit(const std::vector<CommitConfirm>& confirms,
                         const CompositeWeights& weights, double leader_weight,
                         const CryptoScheme& scheme, const KeyDirectory& keys) {
    double affirmative = leader_weight;
    for (const CommitConfirm& c : confirms) {
        if (c.value != 1) continue;
        if (!verify_confirm(c, scheme, keys)) continue;
        affirmative += weights.at(c.voter);
    }
    return affirmative > kQuorumThreshold;
}

Ticks retry_backoff(Ticks base, std::uint32_t retry_count) {
    if (retry_count >= 62) throw std::invalid_argument("retry_backoff: count too large");
    return base * (Ticks(1) << retry_count);
}

bool retry_vote(RoundState& state, Ticks now, Ticks backoff_base, std::uint32_t retry_max) {
    if (state.retry_count >= retry_max) {
        state.phase = RoundPhase::failed;
        return false;
    }
    ++state.retry_count;
    state.deadline = now + retry_backoff(backoff_base, state.retry_count);
    state.payload.signature = Signature{}; // stale; the reproposal re-signs
    state.phase = RoundPhase::preparing;
    state.votes.clear();
    state.proof.reset();
    state.confirms.clear();
    return true;
}

TxOffer make_tx_offer(NodeId holder, Bytes payload, const SecretKey& follower_secret,
                      const CryptoScheme& scheme) {
    TxOffer offer;
    offer.holder = holder;
    offer.payload = std::move(payload);
    Digest h = digest(offer.payload);
    offer.signature =
        scheme.sign(std::span(h.bytes.data(), h.bytes.size()), follower_secret, holder);
    return offer;
}

std::optional<Bytes> recover_transaction(const Digest& wanted,
                                         const std::vector<TxOffer>& offers,
                                         const CryptoScheme& scheme, const KeyDirectory& keys) {
    for (const TxOffer& offer : offers) {
        if (digest(offer.payload) != wanted) continue; // wrong payload; keep waiting
        const PublicKey* pk = keys.follower_key(offer.holder);
        if (pk == nullptr) continue;
        if (!scheme.verify(std::span(wanted.bytes.data(), wanted.bytes.size()), offer.signature,
                           *pk))
            continue;
        return offer.payload;
    }
    return std::nullopt;
}

CompositeWeights equal_weights(const std::vector<NodeId>& participants) {
    if (participants.empty()) throw std::invalid_argument("equal_weights: empty set");
    CompositeWeights out;
    double w = 1.0 / double(participants.size());
    for (NodeId id : participants) out.w[id] = w;
    return out;
}

} // namespace wbft
