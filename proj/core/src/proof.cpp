#include "wbft/proof.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbft {
namespace {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_bytes(Bytes& out, const Bytes& b) {
    put_u32(out, std::uint32_t(b.size()));
    out.insert(out.end(), b.begin(), b.end());
}

void put_digest(Bytes& out, const Digest& d) {
    out.insert(out.end(), d.bytes.begin(), d.bytes.end());
}

} // namespace

void KeyDirectory::register_node(NodeId node, const KeyRing& ring) {
    keys_[node] = {ring.leader.pub, ring.follower.pub};
}

const PublicKey* KeyDirectory::leader_key(NodeId node) const {
    auto it = keys_.find(node);
    return it == keys_.end() ? nullptr : &it->second.first;
}

const PublicKey* KeyDirectory::follower_key(NodeId node) const {
    auto it = keys_.find(node);
    return it == keys_.end() ? nullptr : &it->second.second;
}

Bytes prepare_signing_bytes(const PreparePayload& payload) {
    Bytes out{'p', 'r', 'e', 'p'};
    put_u32(out, payload.leader.value);
    put_u64(out, payload.round);
    put_u64(out, payload.height);
    put_bytes(out, payload.query);
    put_digest(out, payload.response_hash);
    return out;
}

Bytes vote_signing_bytes(const VoteMsg& vote) {
    Bytes out{'v', 'o', 't', 'e'};
    put_u32(out, vote.voter.value);
    put_u32(out, vote.leader.value);
    put_u64(out, vote.height);
    put_u64(out, vote.round);
    out.push_back(vote.value);
    put_digest(out, digest(vote.follower_response));
    return out;
}

Bytes confirm_signing_bytes(const CommitConfirm& confirm) {
    Bytes out{'c', 'o', 'n', 'f'};
    put_u32(out, confirm.voter.value);
    put_u32(out, confirm.leader.value);
    put_u64(out, confirm.height);
    put_u64(out, confirm.round);
    out.push_back(confirm.value);
    return out;
}

Bytes encode_vote(const VoteMsg& vote) {
    Bytes out;
    put_u32(out, vote.voter.value);
    put_u32(out, vote.leader.value);
    put_u64(out, vote.height);
    put_u64(out, vote.round);
    out.push_back(vote.value);
    put_bytes(out, vote.follower_response);
    put_u32(out, vote.signature.signer.value);
    put_digest(out, vote.signature.tag);
    return out;
}

std::optional<VoteMsg> decode_vote(std::span<const std::uint8_t> data) {
    std::size_t off = 0;
    auto need = [&](std::size_t n) { return off + n <= data.size(); };
    auto get_u32 = [&](std::uint32_t& v) {
        if (!need(4)) return false;
        v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(data[off + std::size_t(i)]) << (8 * i);
        off += 4;
        return true;
    };
    auto get_u64 = [&](std::uint64_t& v) {
        if (!need(8)) return false;
        v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(data[off + std::size_t(i)]) << (8 * i);
        off += 8;
        return true;
    };
    VoteMsg v;
    std::uint32_t voter = 0, leader = 0, len = 0, signer = 0;
    if (!get_u32(voter) || !get_u32(leader) || !get_u64(v.height) || !get_u64(v.round))
        return std::nullopt;
    if (!need(1)) return std::nullopt;
    v.value = data[off++];
    if (!get_u32(len) || !need(len)) return std::nullopt;
    v.follower_response.assign(data.begin() + long(off), data.begin() + long(off) + len);
    off += len;
    if (!get_u32(signer) || !need(32)) return std::nullopt;
    std::copy(data.begin() + long(off), data.begin() + long(off) + 32,
              v.signature.tag.bytes.begin());
    off += 32;
    if (off != data.size()) return std::nullopt;
    v.voter = NodeId{voter};
    v.leader = NodeId{leader};
    v.signature.signer = NodeId{signer};
    return v;
}

PreparePayload make_prepare(NodeId leader, std::uint64_t round, std::uint64_t height,
                            Bytes query, Bytes response, const SecretKey& leader_secret,
                            const CryptoScheme& scheme) {
    PreparePayload p;
    p.leader = leader;
    p.round = round;
    p.height = height;
    p.query = std::move(query);
    p.response = std::move(response);
    p.response_hash = digest(p.response);
    Bytes signing = prepare_signing_bytes(p);
    p.signature = scheme.sign(std::span(signing.data(), signing.size()), leader_secret, leader);
    return p;
}

bool verify_prepare(const PreparePayload& payload, const CryptoScheme& scheme,
                    const KeyDirectory& keys) {
    const PublicKey* pk = keys.leader_key(payload.leader);
    if (pk == nullptr) return false;
    if (digest(payload.response) != payload.response_hash) return false;
    Bytes signing = prepare_signing_bytes(payload);
    return scheme.verify(std::span(signing.data(), signing.size()), payload.signature, *pk);
}

VoteMsg make_vote(NodeId voter, const PreparePayload& payload, std::uint8_t value,
                  Bytes follower_response, const SecretKey& follower_secret,
                  const CryptoScheme& scheme) {
    VoteMsg v;
    v.voter = voter;
    v.leader = payload.leader;
    v.height = payload.height;
    v.round = payload.round;
    v.value = value;
    v.follower_response = std::move(follower_response);
    Bytes signing = vote_signing_bytes(v);
    v.signature = scheme.sign(std::span(signing.data(), signing.size()), follower_secret, voter);
    return v;
}

bool verify_vote(const VoteMsg& vote, const CryptoScheme& scheme, const KeyDirectory& keys) {
    const PublicKey* pk = keys.follower_key(vote.voter);
    if (pk == nullptr) return false;
    Bytes signing = vote_signing_bytes(vote);
    return scheme.verify(std::span(signing.data(), signing.size()), vote.signature, *pk);
}

CommitConfirm make_confirm(NodeId voter, NodeId leader, std::uint64_t height,
                           std::uint64_t round, std::uint8_t value,
                           const SecretKey& follower_secret, const CryptoScheme& scheme) {
    CommitConfirm c;
    c.voter = voter;
    c.leader = leader;
    c.height = height;
    c.round = round;
    c.value = value;
    Bytes signing = confirm_signing_bytes(c);
    c.signature = scheme.sign(std::span(signing.data(), signing.size()), follower_secret, voter);
    return c;
}

bool verify_confirm(const CommitConfirm& confirm, const CryptoScheme& scheme,
                    const KeyDirectory& keys) {
    const PublicKey* pk = keys.follower_key(confirm.voter);
    if (pk == nullptr) return false;
    Bytes signing = confirm_signing_bytes(confirm);
    return scheme.verify(std::span(signing.data(), signing.size()), confirm.signature, *pk);
}

Digest proof_aggregate_tag(const Proof& proof) {
    Bytes buf{'a', 'g', 'g', 'r'};
    put_u32(buf, proof.leader.value);
    put_u64(buf, proof.height);
    put_u64(buf, proof.round);
    for (const VoteMsg& v : proof.votes) {
        put_u32(buf, v.voter.value);
        buf.push_back(v.value);
        put_digest(buf, v.signature.tag);
    }
    return digest(buf);
}

std::optional<Proof> make_proof(const std::vector<VoteMsg>& votes,
                                const CompositeWeights& weights, double leader_weight,
                                const CryptoScheme& scheme, const KeyDirectory& keys) {
    Proof proof;
    bool have_ref = false;
    for (const VoteMsg& v : votes) {
        if (!have_ref) {
            proof.leader = v.leader;
            proof.height = v.height;
            proof.round = v.round;
            have_ref = true;
        } else if (v.leader != proof.leader || v.height != proof.height ||
                   v.round != proof.round) {
            throw std::invalid_argument("make_proof: votes reference different instances");
        }
        if (!verify_vote(v, scheme, keys)) continue;
        proof.votes.push_back(v);
    }
    proof.leader_weight = leader_weight;
    std::sort(proof.votes.begin(), proof.votes.end(),
              [](const VoteMsg& a, const VoteMsg& b) { return a.voter < b.voter; });

    double affirmative = leader_weight;
    for (const VoteMsg& v : proof.votes)
        if (v.value == 1) affirmative += weights.at(v.voter);
    if (!(affirmative > kQuorumThreshold)) return std::nullopt;

    proof.aggregate_tag = proof_aggregate_tag(proof);
    return proof;
}

double proof_affirmative_weight(const Proof& proof, const CompositeWeights& weights) {
    double affirmative = proof.leader_weight;
    for (const VoteMsg& v : proof.votes)
        if (v.value == 1) affirmative += weights.at(v.voter);
    return affirmative;
}

bool verify_proof(const Proof& proof, const CompositeWeights& weights,
                  const CryptoScheme& scheme, const KeyDirectory& keys) {
    for (const VoteMsg& v : proof.votes) {
        if (v.leader != proof.leader || v.height != proof.height || v.round != proof.round)
            return false;
        if (!verify_vote(v, scheme, keys)) return false;
    }
    if (proof_aggregate_tag(proof) != proof.aggregate_tag) return false;
    return proof_affirmative_weight(proof, weights) > kQuorumThreshold;
}

} // namespace wbft
