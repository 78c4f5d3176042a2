#include <doctest.h>

#include "wbft/crypto.hpp"

using namespace wbft;

namespace {
Bytes msg(const char* s) { return Bytes(s, s + std::char_traits<char>::length(s)); }
} // namespace

TEST_CASE("sign/verify round-trip, tamper and wrong key") {
    KeyedHashCrypto crypto;
    KeyRing a = make_key_ring(crypto, NodeId{0}, 42);
    KeyRing b = make_key_ring(crypto, NodeId{1}, 42);

    Bytes m = msg("the payload");
    Signature sig = crypto.sign(std::span(m.data(), m.size()), a.follower.sec, NodeId{0});
    CHECK(crypto.verify(std::span(m.data(), m.size()), sig, a.follower.pub));

    Bytes altered = msg("the payloae");
    CHECK_FALSE(crypto.verify(std::span(altered.data(), altered.size()), sig, a.follower.pub));
    CHECK_FALSE(crypto.verify(std::span(m.data(), m.size()), sig, b.follower.pub));
}

TEST_CASE("leader and follower pairs are distinct") {
    KeyedHashCrypto crypto;
    KeyRing ring = make_key_ring(crypto, NodeId{3}, 7);
    CHECK(ring.leader.pub.id != ring.follower.pub.id);
    CHECK(ring.leader.sec.bytes != ring.follower.sec.bytes);
}

TEST_CASE("key generation is deterministic per (node, seed)") {
    KeyedHashCrypto c1, c2;
    KeyRing r1 = make_key_ring(c1, NodeId{5}, 99);
    KeyRing r2 = make_key_ring(c2, NodeId{5}, 99);
    CHECK(r1.leader.pub.id == r2.leader.pub.id);
    KeyRing r3 = make_key_ring(c1, NodeId{5}, 100);
    CHECK(r1.leader.pub.id != r3.leader.pub.id);
}

TEST_CASE("verification fails for unregistered keys") {
    KeyedHashCrypto crypto;
    KeyRing ring = make_key_ring(crypto, NodeId{0}, 1);
    KeyedHashCrypto other;
    Bytes m = msg("x");
    Signature sig = crypto.sign(std::span(m.data(), m.size()), ring.follower.sec, NodeId{0});
    CHECK_FALSE(other.verify(std::span(m.data(), m.size()), sig, ring.follower.pub));
}
