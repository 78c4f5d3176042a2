#pragma once

#include <optional>
#include <vector>

#include "wbft/crypto.hpp"
#include "wbft/digest.hpp"
#include "wbft/ids.hpp"
#include "wbft/weights.hpp"

namespace wbft {

// Public halves of every node's key ring, network-visible.
class KeyDirectory {
public:
    void register_node(NodeId node, const KeyRing& ring);
    const PublicKey* leader_key(NodeId node) const;
    const PublicKey* follower_key(NodeId node) const;

private:
    std::map<NodeId, std::pair<PublicKey, PublicKey>> keys_;
};

// Authenticated wrapping of (query, leader response). All nodes hold all
// public keys, so confidentiality is not modeled; the wrap binds content to
// the leader identity and makes tampering detectable.
struct PreparePayload {
    NodeId leader{};
    std::uint64_t round = 0;
    std::uint64_t height = 0;
    Bytes query;
    Bytes response;
    Digest response_hash{};
    Signature signature{};

    bool operator==(const PreparePayload&) const = default;
};

struct VoteMsg {
    NodeId voter{};
    NodeId leader{};
    std::uint64_t height = 0;
    std::uint64_t round = 0;
    std::uint8_t value = 0; // 1 iff the leader response is at least as good
    Bytes follower_response;
    Signature signature{};

    bool operator==(const VoteMsg&) const = default;
};

struct CommitConfirm {
    NodeId voter{};
    NodeId leader{};
    std::uint64_t height = 0;
    std::uint64_t round = 0;
    std::uint8_t value = 0;
    Signature signature{};

    bool operator==(const CommitConfirm&) const = default;
};

// Canonical signing bytes. Votes cover the follower response by digest, so a
// flipped vote bit or swapped response invalidates the signature.
Bytes prepare_signing_bytes(const PreparePayload& payload);
Bytes vote_signing_bytes(const VoteMsg& vote);
Bytes confirm_signing_bytes(const CommitConfirm& confirm);

// Wire encodings with round-trip decode; used by the serialization property
// tests and anywhere a message crosses the simulated network as bytes.
Bytes encode_vote(const VoteMsg& vote);
std::optional<VoteMsg> decode_vote(std::span<const std::uint8_t> data);

PreparePayload make_prepare(NodeId leader, std::uint64_t round, std::uint64_t height,
                            Bytes query, Bytes response, const SecretKey& leader_secret,
                            const CryptoScheme& scheme);
bool verify_prepare(const PreparePayload& payload, const CryptoScheme& scheme,
                    const KeyDirectory& keys);

VoteMsg make_vote(NodeId voter, const PreparePayload& payload, std::uint8_t value,
                  Bytes follower_response, const SecretKey& follower_secret,
                  const CryptoScheme& scheme);
bool verify_vote(const VoteMsg& vote, const CryptoScheme& scheme, const KeyDirectory& keys);

CommitConfirm make_confirm(NodeId voter, NodeId leader, std::uint64_t height,
                           std::uint64_t round, std::uint8_t value,
                           const SecretKey& follower_secret, const CryptoScheme& scheme);
bool verify_confirm(const CommitConfirm& confirm, const CryptoScheme& scheme,
                    const KeyDirectory& keys);

// Threshold-signature stand-in: the constituent signed votes plus an
// aggregate digest over them.
struct Proof {
    NodeId leader{};
    std::uint64_t height = 0;
    std::uint64_t round = 0;
    double leader_weight = 0.0;
    std::vector<VoteMsg> votes;
    Digest aggregate_tag{};

    bool operator==(const Proof&) const = default;
};

Digest proof_aggregate_tag(const Proof& proof);

// Builds a proof iff the affirmative weight (votes with value 1, by the
// given per-initiator weights) plus the leader's own weight strictly exceeds
// 2/3. Returns nullopt on quorum failure (Theorem-1 retry path). Votes with
// invalid signatures or mismatched references never count and are excluded.
std::optional<Proof> make_proof(const std::vector<VoteMsg>& votes,
                                const CompositeWeights& weights, double leader_weight,
                                const CryptoScheme& scheme, const KeyDirectory& keys);

// Full recheck from the proof alone: every constituent signature, consistent
// references, aggregate tag, and strict quorum arithmetic.
bool verify_proof(const Proof& proof, const CompositeWeights& weights,
                  const CryptoScheme& scheme, const KeyDirectory& keys);

// The weighted affirmative sum the proof claims, recomputed.
double proof_affirmative_weight(const Proof& proof, const CompositeWeights& weights);

constexpr double kQuorumThreshold = 2.0 / 3.0;

} // namespace wbft
