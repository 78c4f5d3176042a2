#include "wbft/netsim.hpp"

#include <cassert>
#include <cstdio>

namespace wbft {

const char* to_string(ByzantineBehavior behavior) {
    switch (behavior) {
        case ByzantineBehavior::none: return "none";
        case ByzantineBehavior::bad_vote: return "bad-vote";
        case ByzantineBehavior::invalid_proof: return "invalid-proof";
        case ByzantineBehavior::fake_response: return "fake-response";
        case ByzantineBehavior::silent: return "silent";
    }
    return "?";
}

ByzantineBehavior LlmProfile::behavior_for_round(std::uint64_t round) const {
    if (behaviors.empty()) return ByzantineBehavior::none;
    if (!cycle_behaviors || behaviors.size() == 1) return behaviors.front();
    return behaviors[std::size_t(round % behaviors.size())];
}

void EventQueue::push_timer(Ticks at, NodeId owner, std::uint64_t tag) {
    Event e;
    e.at = at;
    e.seq = next_seq_++;
    e.kind = EventKind::timer;
    e.to = owner;
    e.tag = tag;
    heap_.push(std::move(e));
}

void EventQueue::push_deliver(Ticks at, NodeId from, NodeId to, MessageBody body) {
    Event e;
    e.at = at;
    e.seq = next_seq_++;
    e.kind = EventKind::deliver;
    e.from = from;
    e.to = to;
    e.body = std::move(body);
    heap_.push(std::move(e));
}

std::optional<Event> EventQueue::pop() {
    if (heap_.empty()) return std::nullopt;
    Event e = heap_.top();
    heap_.pop();
    assert(e.at >= last_popped_ && "event time went backwards");
    last_popped_ = e.at;
    return e;
}

Network::Network(std::uint64_t seed, double p_success, Ticks slot_ticks,
                 Ticks delivery_jitter_ticks)
    : field_(seed), p_success_(p_success), slot_ticks_(slot_ticks),
      jitter_(delivery_jitter_ticks) {}

bool Network::link_up(const LinkAddress& addr) const {
    if (p_success_ >= 1.0) return true;
    double u = field_.uniform(rng_tag("link-drop"), addr.request,
                              (std::uint64_t(addr.attempt) << 8) | addr.stage,
                              addr.from.value, addr.to.value);
    return u < p_success_;
}

bool Network::deliver(EventQueue& queue, const LinkAddress& addr, Ticks arrive_at,
                      MessageBody body) {
    ++messages_sent_;
    if (!link_up(addr)) return false;
    Ticks jitter = 0;
    if (jitter_ > 0) {
        jitter = Ticks(field_.value(rng_tag("jitter"), addr.request,
                                    (std::uint64_t(addr.attempt) << 8) | addr.stage,
                                    addr.from.value, addr.to.value) %
                       std::uint64_t(jitter_ + 1));
    }
    queue.push_deliver(arrive_at + jitter, addr.from, addr.to, std::move(body));
    return true;
}

double sample_response_quality(const LlmProfile& profile, const RandomField& field,
                               std::uint64_t request) {
    if (profile.quality_stddev <= 0.0)
        return std::clamp(profile.quality_mean, 0.0, 100.0);
    double q = field.normal(rng_tag("quality"), profile.quality_mean, profile.quality_stddev,
                            request, profile.node.value);
    return std::clamp(q, 0.0, 100.0);
}

Bytes generate_response(NodeId node, std::uint64_t request, double quality) {
    char buf[96];
    int n = std::snprintf(buf, sizeof(buf), "response node=%u req=%llu q=%.4f", node.value,
                          static_cast<unsigned long long>(request), quality);
    return Bytes(buf, buf + n);
}

std::optional<MessageBody> byzantine_mutate(MessageBody message, ByzantineBehavior behavior,
                                            const LlmProfile& sender,
                                            const CryptoScheme& scheme) {
    switch (behavior) {
        case ByzantineBehavior::none:
            return message;
        case ByzantineBehavior::silent:
            return std::nullopt;
        case ByzantineBehavior::bad_vote:
            if (auto* vote = std::get_if<VoteMsg>(&message)) {
                vote->value ^= 1;
                Bytes signing = vote_signing_bytes(*vote);
                vote->signature = scheme.sign(std::span(signing.data(), signing.size()),
                                              sender.keys.follower.sec, sender.node);
            } else if (auto* confirm = std::get_if<CommitConfirm>(&message)) {
                confirm->value = 0;
                Bytes signing = confirm_signing_bytes(*confirm);
                confirm->signature = scheme.sign(std::span(signing.data(), signing.size()),
                                                 sender.keys.follower.sec, sender.node);
            }
            return message;
        case ByzantineBehavior::invalid_proof:
            if (auto* proof = std::get_if<Proof>(&message)) {
                proof->aggregate_tag.bytes[0] ^= 0xff;
            }
            return message;
        case ByzantineBehavior::fake_response:
            if (auto* prep = std::get_if<PreparePayload>(&message)) {
                // Low-effort substitute whose digest no longer matches the
                // claimed response hash.
                prep->response = generate_response(sender.node, prep->round, 0.0);
                prep->response.insert(prep->response.begin(), {'f', 'a', 'k', 'e', ':'});
            }
            return message;
    }
    return message;
}

} // namespace wbft
