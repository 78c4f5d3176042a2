#include <doctest.h>

#include <cmath>

#include "wbft/netsim.hpp"

using namespace wbft;

namespace {

LlmProfile profile_of(std::uint32_t id, double mean, double stddev,
                      std::vector<ByzantineBehavior> behaviors = {}) {
    LlmProfile p;
    p.node = NodeId{id};
    p.quality_mean = mean;
    p.quality_stddev = stddev;
    p.behaviors = std::move(behaviors);
    return p;
}

} // namespace

TEST_CASE("perfect links never drop") {
    Network net(1, 1.0, 10);
    EventQueue q;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        LinkAddress addr{r, 0, kStagePrepareDown, NodeId{0}, NodeId{1}};
        CHECK(net.link_up(addr));
    }
}

TEST_CASE("empirical delivery frequency converges to the configured rate") {
    Network net(99, 0.5, 10);
    std::uint64_t delivered = 0;
    for (std::uint64_t r = 0; r < 100000; ++r) {
        LinkAddress addr{r, 0, kStagePrepareUp, NodeId{2}, NodeId{3}};
        if (net.link_up(addr)) ++delivered;
    }
    double freq = double(delivered) / 100000.0;
    CHECK(std::fabs(freq - 0.5) < 0.01);
}

TEST_CASE("identical seeds give identical drop patterns") {
    Network a(7, 0.3, 10), b(7, 0.3, 10);
    for (std::uint64_t r = 0; r < 2000; ++r) {
        LinkAddress addr{r, 1, kStageCommitUp, NodeId{0}, NodeId{4}};
        CHECK(a.link_up(addr) == b.link_up(addr));
    }
    Network c(8, 0.3, 10);
    int diff = 0;
    for (std::uint64_t r = 0; r < 2000; ++r) {
        LinkAddress addr{r, 1, kStageCommitUp, NodeId{0}, NodeId{4}};
        if (a.link_up(addr) != c.link_up(addr)) ++diff;
    }
    CHECK(diff > 0);
}

TEST_CASE("deliver schedules at the arrival tick and counts the send") {
    Network net(3, 1.0, 10);
    EventQueue q;
    LinkAddress addr{0, 0, kStagePrepareDown, NodeId{0}, NodeId{1}};
    CHECK(net.deliver(q, addr, 25, MessageBody{std::monostate{}}));
    CHECK(net.messages_sent() == 1);
    auto e = q.pop();
    REQUIRE(e.has_value());
    CHECK(e->at == 25);
    CHECK(e->to == NodeId{1});
    CHECK(e->kind == EventKind::deliver);
}

TEST_CASE("event queue pops in time then sequence order") {
    EventQueue q;
    q.push_timer(30, NodeId{0}, 1);
    q.push_timer(10, NodeId{0}, 2);
    q.push_timer(10, NodeId{0}, 3);
    q.push_timer(20, NodeId{0}, 4);
    std::vector<std::uint64_t> tags;
    while (auto e = q.pop()) tags.push_back(e->tag);
    CHECK(tags == std::vector<std::uint64_t>{2, 3, 4, 1});
}

TEST_CASE("zero stddev always returns the mean; draws clamp to the scale") {
    RandomField field(5);
    LlmProfile fixed = profile_of(0, 77.0, 0.0);
    for (std::uint64_t r = 0; r < 10; ++r)
        CHECK(sample_response_quality(fixed, field, r) == doctest::Approx(77.0));

    LlmProfile high = profile_of(1, 99.0, 10.0);
    for (std::uint64_t r = 0; r < 5000; ++r) {
        double q = sample_response_quality(high, field, r);
        CHECK(q <= 100.0);
        CHECK(q >= 0.0);
    }
}

TEST_CASE("a stronger responder wins most paired quality draws") {
    RandomField field(11);
    LlmProfile strong = profile_of(0, 88.7, 5.0);
    LlmProfile weak = profile_of(1, 77.6, 5.0);
    int wins = 0;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        if (sample_response_quality(strong, field, r) >
            sample_response_quality(weak, field, r))
            ++wins;
    }
    CHECK(wins > 8000);
}

TEST_CASE("byzantine mutations") {
    KeyedHashCrypto crypto;
    KeyDirectory keys;
    LlmProfile sender = profile_of(1, 80.0, 0.0);
    sender.keys = make_key_ring(crypto, sender.node, 55);
    keys.register_node(sender.node, sender.keys);

    VoteMsg vote;
    vote.voter = sender.node;
    vote.leader = NodeId{0};
    vote.height = 2;
    vote.round = 3;
    vote.value = 1;
    vote.follower_response = Bytes{'x'};
    Bytes signing = vote_signing_bytes(vote);
    vote.signature = crypto.sign(std::span(signing.data(), signing.size()),
                                 sender.keys.follower.sec, sender.node);

    SUBCASE("none is the identity") {
        auto out = byzantine_mutate(MessageBody{vote}, ByzantineBehavior::none, sender, crypto);
        REQUIRE(out.has_value());
        CHECK(std::get<VoteMsg>(*out) == vote);
    }
    SUBCASE("bad-vote flips the bit and re-signs validly") {
        auto out =
            byzantine_mutate(MessageBody{vote}, ByzantineBehavior::bad_vote, sender, crypto);
        REQUIRE(out.has_value());
        const VoteMsg& flipped = std::get<VoteMsg>(*out);
        CHECK(flipped.value == 0);
        CHECK(verify_vote(flipped, crypto, keys)); // valid envelope, dishonest content
    }
    SUBCASE("silent swallows the message") {
        CHECK_FALSE(
            byzantine_mutate(MessageBody{vote}, ByzantineBehavior::silent, sender, crypto)
                .has_value());
    }
    SUBCASE("invalid-proof corrupts the aggregate tag") {
        Proof proof;
        proof.leader = NodeId{1};
        proof.aggregate_tag = proof_aggregate_tag(proof);
        auto out = byzantine_mutate(MessageBody{proof}, ByzantineBehavior::invalid_proof,
                                    sender, crypto);
        REQUIRE(out.has_value());
        CHECK(std::get<Proof>(*out).aggregate_tag != proof.aggregate_tag);
    }
    SUBCASE("fake-response breaks the digest claim") {
        PreparePayload prep = make_prepare(sender.node, 3, 2, Bytes{'q'}, Bytes{'r'},
                                           sender.keys.leader.sec, crypto);
        auto out = byzantine_mutate(MessageBody{prep}, ByzantineBehavior::fake_response,
                                    sender, crypto);
        REQUIRE(out.has_value());
        const PreparePayload& fake = std::get<PreparePayload>(*out);
        CHECK(digest(fake.response) != fake.response_hash);
        CHECK_FALSE(verify_prepare(fake, crypto, keys));
    }
}

TEST_CASE("behavior cycling walks the configured list") {
    LlmProfile p = profile_of(0, 80.0, 0.0,
                              {ByzantineBehavior::bad_vote, ByzantineBehavior::silent});
    p.cycle_behaviors = true;
    CHECK(p.behavior_for_round(0) == ByzantineBehavior::bad_vote);
    CHECK(p.behavior_for_round(1) == ByzantineBehavior::silent);
    CHECK(p.behavior_for_round(2) == ByzantineBehavior::bad_vote);
    p.cycle_behaviors = false;
    CHECK(p.behavior_for_round(1) == ByzantineBehavior::bad_vote);
}
