#include <doctest.h>

#include <filesystem>

#include "wbft/block.hpp"
#include "wbft/rng.hpp"

using namespace wbft;

namespace {

Block make_block(const Chain& chain, std::uint64_t round, Bytes payload) {
    Block b;
    b.leader = chain.leader();
    b.height = chain.next_height();
    b.round = round;
    b.prev_hash = chain.tip_digest();
    b.response = std::move(payload);
    b.response_hash = digest(b.response);
    b.timestamp = Ticks(round * 10);
    return b;
}

} // namespace

TEST_CASE("genesis append and verify") {
    Chain chain(NodeId{2});
    Block b = make_block(chain, 0, Bytes{'h', 'i'});
    CHECK(b.prev_hash.is_zero());
    CHECK(chain.append(b) == AppendError::none);
    CHECK(chain.blocks().size() == 1);
    CHECK(verify_chain(chain));
}

TEST_CASE("append rejects broken links and height gaps") {
    Chain chain(NodeId{0});
    REQUIRE(chain.append(make_block(chain, 0, Bytes{1})) == AppendError::none);

    Block bad_link = make_block(chain, 1, Bytes{2});
    bad_link.prev_hash.bytes[0] ^= 1;
    CHECK(chain.append(bad_link) == AppendError::link_mismatch);

    Block gap = make_block(chain, 1, Bytes{2});
    gap.height = 5;
    CHECK(chain.append(gap) == AppendError::height_gap);

    Block wrong_hash = make_block(chain, 1, Bytes{2});
    wrong_hash.response_hash.bytes[0] ^= 1;
    CHECK(chain.append(wrong_hash) == AppendError::hash_mismatch);
}

TEST_CASE("thousand sequential appends verify against regenerated links") {
    Chain chain(NodeId{1});
    SplitMix rng(7);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Bytes payload(16);
        for (auto& c : payload) c = std::uint8_t(rng.next());
        REQUIRE(chain.append(make_block(chain, i, payload)) == AppendError::none);
    }
    REQUIRE(verify_chain(chain));

    // Independent oracle: recompute every link from scratch and compare.
    Digest prev = Digest::zero();
    for (const Block& b : chain.blocks()) {
        CHECK(b.prev_hash == prev);
        prev = block_digest(b);
    }
    CHECK(prev == chain.tip_digest());
}

TEST_CASE("block record encode/decode round-trips") {
    SplitMix rng(11);
    for (int i = 0; i < 200; ++i) {
        Block b;
        b.leader = NodeId{std::uint32_t(rng.below(64))};
        b.height = rng.next() % 100000;
        b.round = rng.next() % 100000;
        for (auto& c : b.prev_hash.bytes) c = std::uint8_t(rng.next());
        b.timestamp = Ticks(rng.next() % 1000000);
        b.response.resize(rng.below(100));
        for (auto& c : b.response) c = std::uint8_t(rng.next());
        b.response_hash = digest(b.response);

        Bytes enc = encode_block(b);
        std::size_t off = 0;
        auto dec = decode_block(std::span(enc.data(), enc.size()), off);
        REQUIRE(dec.has_value());
        CHECK(off == enc.size());
        CHECK(*dec == b);
    }
}

TEST_CASE("decode rejects truncated records") {
    Block b;
    b.response = Bytes{1, 2, 3};
    b.response_hash = digest(b.response);
    Bytes enc = encode_block(b);
    for (std::size_t cut : {std::size_t(3), std::size_t(20), enc.size() - 1}) {
        std::size_t off = 0;
        CHECK_FALSE(decode_block(std::span(enc.data(), cut), off).has_value());
    }
}

TEST_CASE("ledger persistence round-trips byte-identically") {
    LedgerSet set;
    SplitMix rng(3);
    for (std::uint32_t leader = 0; leader < 3; ++leader) {
        Chain& chain = set.chain_for(NodeId{leader});
        for (std::uint64_t h = 0; h < 5; ++h) {
            Bytes payload(8);
            for (auto& c : payload) c = std::uint8_t(rng.next());
            REQUIRE(chain.append(make_block(chain, h, payload)) == AppendError::none);
        }
    }
    auto dir = std::filesystem::temp_directory_path() / "wbft_ledger_test";
    std::filesystem::remove_all(dir);
    persist_ledgers(set, dir);
    LedgerSet loaded = load_ledgers(dir);
    CHECK(loaded == set);
    CHECK(loaded.encode() == set.encode());

    // A second persist writes byte-identical files.
    auto dir2 = std::filesystem::temp_directory_path() / "wbft_ledger_test2";
    std::filesystem::remove_all(dir2);
    persist_ledgers(set, dir2);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        auto other = dir2 / entry.path().filename();
        REQUIRE(std::filesystem::exists(other));
        CHECK(std::filesystem::file_size(entry.path()) == std::filesystem::file_size(other));
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}
