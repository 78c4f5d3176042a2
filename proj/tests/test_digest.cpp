#include <doctest.h>

#include <unordered_set>

#include "wbft/digest.hpp"
#include "wbft/rng.hpp"

using namespace wbft;

TEST_CASE("digest is deterministic") {
    Bytes data{1, 2, 3, 4, 5};
    CHECK(digest(data) == digest(data));
    CHECK(digest("hello") == digest("hello"));
    CHECK(digest("hello") != digest("hellp"));
}

TEST_CASE("empty input does not collide with the genesis sentinel") {
    CHECK_FALSE(digest("").is_zero());
    CHECK(Digest::zero().is_zero());
}

TEST_CASE("known sha-256 vectors") {
    CHECK(digest("").hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(digest("abc").hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // Block-boundary exercise: 56 bytes forces the two-block padding path.
    CHECK(digest("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq").hex() ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("collision scan over one million random inputs") {
    SplitMix rng(0xdeadbeef);
    std::unordered_set<Digest> seen;
    seen.reserve(1 << 21);
    Bytes buf(64);
    for (int i = 0; i < 1000000; ++i) {
        for (std::size_t w = 0; w < 64; w += 8) {
            std::uint64_t v = rng.next();
            for (std::size_t b = 0; b < 8; ++b) buf[w + b] = std::uint8_t(v >> (8 * b));
        }
        auto [it, inserted] = seen.insert(digest(buf));
        REQUIRE(inserted);
    }
    CHECK(seen.size() == 1000000);
}

TEST_CASE("hex rendering") {
    Digest d;
    d.bytes[0] = 0xab;
    d.bytes[31] = 0x01;
    std::string hex = d.hex();
    CHECK(hex.size() == 64);
    CHECK(hex.substr(0, 2) == "ab");
    CHECK(hex.substr(62, 2) == "01");
}
