#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "wbft/digest.hpp"
#include "wbft/ids.hpp"

namespace wbft {

// One committed response on a leader's chain. The genesis predecessor is the
// all-zero digest.
struct Block {
    NodeId leader{};
    std::uint64_t height = 0;
    std::uint64_t round = 0;
    Digest prev_hash{};
    Digest response_hash{};
    Ticks timestamp = 0;
    Bytes response;

    bool operator==(const Block&) const = default;
};

// Digest over the fixed-width header fields; used as the prev_hash link.
Digest block_digest(const Block& block);

// Binary record layout (little-endian), in this exact field order:
//   leader u32 | height u64 | round u64 | prev_hash 32B | response_hash 32B |
//   timestamp u64 | payload_len u32 | payload
Bytes encode_block(const Block& block);
std::optional<Block> decode_block(std::span<const std::uint8_t> data, std::size_t& offset);

enum class AppendError { none, link_mismatch, height_gap, hash_mismatch };

class Chain {
public:
    Chain() = default;
    explicit Chain(NodeId leader) : leader_(leader) {}

    NodeId leader() const { return leader_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    bool empty() const { return blocks_.empty(); }
    std::uint64_t next_height() const { return blocks_.size(); }
    Digest tip_digest() const;

    // Requires block.height == next_height() and block.prev_hash == tip.
    AppendError append(Block block);

    bool operator==(const Chain&) const = default;

private:
    NodeId leader_{};
    std::vector<Block> blocks_;
};

// Re-checks every link, height and response digest from scratch.
bool verify_chain(const Chain& chain);

// Every node replicates every leader's chain.
class LedgerSet {
public:
    Chain& chain_for(NodeId leader);
    const Chain* find(NodeId leader) const;
    const std::map<NodeId, Chain>& chains() const { return chains_; }

    Bytes encode() const;
    bool operator==(const LedgerSet&) const = default;

private:
    std::map<NodeId, Chain> chains_;
};

// On-disk layout: one <dir>/leader_<id>.chain file of concatenated block
// records per leader, plus <dir>/manifest.tsv listing leader id, tip height
// and tip digest, ordered by leader id.
void persist_ledgers(const LedgerSet& ledgers, const std::filesystem::path& dir);
LedgerSet load_ledgers(const std::filesystem::path& dir);

} // namespace wbft
