#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "wbft/block.hpp"
#include "wbft/ids.hpp"
#include "wbft/profile.hpp"
#include "wbft/proof.hpp"
#include "wbft/rng.hpp"

namespace wbft {

struct SimClock {
    Ticks now = 0;
    double tick_seconds = 1e-4;

    double to_seconds(Ticks t) const { return double(t) * tick_seconds; }
    Ticks from_seconds(double s) const {
        return Ticks(std::llround(s / tick_seconds));
    }
};

using MessageBody = std::variant<std::monostate, PreparePayload, VoteMsg, CommitConfirm,
                                 Proof, Block>;

enum class EventKind { deliver, timer };

struct Event {
    Ticks at = 0;
    std::uint64_t seq = 0; // deterministic tiebreak
    EventKind kind = EventKind::timer;
    NodeId to{};
    std::uint64_t tag = 0;
    NodeId from{};
    MessageBody body;
};

// Pops in (at, seq) order; fully deterministic.
class EventQueue {
public:
    void push_timer(Ticks at, NodeId owner, std::uint64_t tag);
    void push_deliver(Ticks at, NodeId from, NodeId to, MessageBody body);
    std::optional<Event> pop();
    bool empty() const { return heap_.empty(); }
    Ticks last_popped() const { return last_popped_; }

private:
    struct Order {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Order> heap_;
    std::uint64_t next_seq_ = 0;
    Ticks last_popped_ = 0;
};

// Addressed coordinates of one link transmission; the drop decision is a
// pure function of (seed, these fields), so paired-seed runs of different
// modes see identical losses on the links they share.
struct LinkAddress {
    std::uint64_t request = 0;
    std::uint32_t attempt = 0;
    std::uint32_t stage = 0; // prepare down/up, commit down/up, dissemination
    NodeId from{};
    NodeId to{};
};

constexpr std::uint32_t kStagePrepareDown = 0;
constexpr std::uint32_t kStagePrepareUp = 1;
constexpr std::uint32_t kStageCommitDown = 2;
constexpr std::uint32_t kStageCommitUp = 3;
constexpr std::uint32_t kStageDissemination = 4;

class Network {
public:
    Network(std::uint64_t seed, double p_success, Ticks slot_ticks,
            Ticks delivery_jitter_ticks = 0);

    // With probability P_l schedules delivery at arrive_at (plus jitter) and
    // returns true; otherwise the message is dropped and the receiver never
    // sees it. The send is counted either way.
    bool deliver(EventQueue& queue, const LinkAddress& addr, Ticks arrive_at,
                 MessageBody body);

    // Drop decision alone; used where arrivals are tallied at a deadline.
    bool link_up(const LinkAddress& addr) const;

    double p_success() const { return p_success_; }
    Ticks slot_ticks() const { return slot_ticks_; }
    std::uint64_t messages_sent() const { return messages_sent_; }
    void count_messages(std::uint64_t n) { messages_sent_ += n; }
    void reset_message_counter() { messages_sent_ = 0; }

    const RandomField& field() const { return field_; }

private:
    RandomField field_;
    double p_success_;
    Ticks slot_ticks_;
    Ticks jitter_;
    std::uint64_t messages_sent_ = 0;
};

// Draws a response quality from the profile's distribution, clamped to
// [0, 100]. Addressed by (request, node) so every observer sees the same
// sampled quality for a given response.
double sample_response_quality(const LlmProfile& profile, const RandomField& field,
                               std::uint64_t request);

// Deterministic mock responder output; embeds enough context that distinct
// (leader, request) pairs hash differently.
Bytes generate_response(NodeId node, std::uint64_t request, double quality);

// Fault injection. Returns nullopt for silence; otherwise the (possibly
// altered) message. bad-vote re-signs with the sender's own key, so the
// envelope stays valid while the content lies. invalid-proof corrupts the
// aggregate tag. fake-response swaps the payload under the original digest
// claim.
std::optional<MessageBody> byzantine_mutate(MessageBody message, ByzantineBehavior behavior,
                                            const LlmProfile& sender,
                                            const CryptoScheme& scheme);

} // namespace wbft
