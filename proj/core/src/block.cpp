#include "wbft/block.hpp"

#include <fstream>
#include <stdexcept>

namespace wbft {
namespace {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

bool get_u32(std::span<const std::uint8_t> in, std::size_t& off, std::uint32_t& v) {
    if (off + 4 > in.size()) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[off + std::size_t(i)]) << (8 * i);
    off += 4;
    return true;
}

bool get_u64(std::span<const std::uint8_t> in, std::size_t& off, std::uint64_t& v) {
    if (off + 8 > in.size()) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[off + std::size_t(i)]) << (8 * i);
    off += 8;
    return true;
}

bool get_digest(std::span<const std::uint8_t> in, std::size_t& off, Digest& d) {
    if (off + 32 > in.size()) return false;
    std::copy(in.begin() + long(off), in.begin() + long(off) + 32, d.bytes.begin());
    off += 32;
    return true;
}

} // namespace

Bytes encode_block(const Block& block) {
    Bytes out;
    out.reserve(96 + block.response.size());
    put_u32(out, block.leader.value);
    put_u64(out, block.height);
    put_u64(out, block.round);
    out.insert(out.end(), block.prev_hash.bytes.begin(), block.prev_hash.bytes.end());
    out.insert(out.end(), block.response_hash.bytes.begin(), block.response_hash.bytes.end());
    put_u64(out, std::uint64_t(block.timestamp));
    put_u32(out, std::uint32_t(block.response.size()));
    out.insert(out.end(), block.response.begin(), block.response.end());
    return out;
}

std::optional<Block> decode_block(std::span<const std::uint8_t> data, std::size_t& offset) {
    Block b;
    std::uint32_t leader = 0, payload_len = 0;
    std::uint64_t ts = 0;
    if (!get_u32(data, offset, leader)) return std::nullopt;
    if (!get_u64(data, offset, b.height)) return std::nullopt;
    if (!get_u64(data, offset, b.round)) return std::nullopt;
    if (!get_digest(data, offset, b.prev_hash)) return std::nullopt;
    if (!get_digest(data, offset, b.response_hash)) return std::nullopt;
    if (!get_u64(data, offset, ts)) return std::nullopt;
    if (!get_u32(data, offset, payload_len)) return std::nullopt;
    if (offset + payload_len > data.size()) return std::nullopt;
    b.leader = NodeId{leader};
    b.timestamp = Ticks(ts);
    b.response.assign(data.begin() + long(offset), data.begin() + long(offset) + payload_len);
    offset += payload_len;
    return b;
}

Digest block_digest(const Block& block) {
    // Links cover the header only; the payload is pinned via response_hash.
    Block header = block;
    header.response.clear();
    return digest(encode_block(header));
}

Digest Chain::tip_digest() const {
    if (blocks_.empty()) return Digest::zero();
    return block_digest(blocks_.back());
}

AppendError Chain::append(Block block) {
    if (block.height != next_height()) return AppendError::height_gap;
    if (block.prev_hash != tip_digest()) return AppendError::link_mismatch;
    if (digest(block.response) != block.response_hash) return AppendError::hash_mismatch;
    blocks_.push_back(std::move(block));
    return AppendError::none;
}

bool verify_chain(const Chain& chain) {
    Digest prev = Digest::zero();
    std::uint64_t expect_height = 0;
    for (const Block& b : chain.blocks()) {
        if (b.leader != chain.leader()) return false;
        if (b.height != expect_height) return false;
        if (b.prev_hash != prev) return false;
        if (digest(b.response) != b.response_hash) return false;
        prev = block_digest(b);
        ++expect_height;
    }
    return true;
}

Chain& LedgerSet::chain_for(NodeId leader) {
    auto it = chains_.find(leader);
    if (it == chains_.end()) it = chains_.emplace(leader, Chain(leader)).first;
    return it->second;
}

const Chain* LedgerSet::find(NodeId leader) const {
    auto it = chains_.find(leader);
    return it == chains_.end() ? nullptr : &it->second;
}

Bytes LedgerSet::encode() const {
    Bytes out;
    for (const auto& [leader, chain] : chains_) {
        (void)leader;
        for (const Block& b : chain.blocks()) {
            Bytes rec = encode_block(b);
            out.insert(out.end(), rec.begin(), rec.end());
        }
    }
    return out;
}

void persist_ledgers(const LedgerSet& ledgers, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "manifest.tsv", std::ios::binary);
    if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());
    manifest << "leader\theight\ttip\n";
    for (const auto& [leader, chain] : ledgers.chains()) {
        std::filesystem::path file = dir / ("leader_" + std::to_string(leader.value) + ".chain");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + file.string());
        for (const Block& b : chain.blocks()) {
            Bytes rec = encode_block(b);
            out.write(reinterpret_cast<const char*>(rec.data()), long(rec.size()));
        }
        manifest << leader.value << '\t' << chain.blocks().size() << '\t'
                 << chain.tip_digest().hex() << '\n';
    }
}

LedgerSet load_ledgers(const std::filesystem::path& dir) {
    LedgerSet out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("leader_", 0) != 0) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t off = 0;
        while (off < data.size()) {
            auto block = decode_block(data, off);
            if (!block) throw std::runtime_error("corrupt chain file " + entry.path().string());
            Chain& chain = out.chain_for(block->leader);
            if (chain.append(std::move(*block)) != AppendError::none)
                throw std::runtime_error("invalid chain order in " + entry.path().string());
        }
    }
    return out;
}

} // namespace wbft
