#include "wbft/crypto.hpp"

#include "wbft/rng.hpp"

namespace wbft {
namespace {

Digest tag_for(const SecretKey& key, std::span<const std::uint8_t> message) {
    Bytes buf;
    buf.reserve(key.bytes.size() + message.size() + 4);
    buf.insert(buf.end(), {'t', 'a', 'g', ':'});
    buf.insert(buf.end(), key.bytes.begin(), key.bytes.end());
    buf.insert(buf.end(), message.begin(), message.end());
    return digest(buf);
}

} // namespace

KeyPair KeyedHashCrypto::generate(std::uint64_t seed_material) {
    SplitMix rng(seed_material);
    KeyPair pair;
    for (std::size_t i = 0; i < 32; i += 8) {
        std::uint64_t word = rng.next();
        for (std::size_t b = 0; b < 8; ++b)
            pair.sec.bytes[i + b] = std::uint8_t(word >> (8 * b));
    }
    Bytes pub_input;
    pub_input.insert(pub_input.end(), {'p', 'u', 'b', ':'});
    pub_input.insert(pub_input.end(), pair.sec.bytes.begin(), pair.sec.bytes.end());
    pair.pub.id = digest(pub_input);
    registry_[pair.pub.id] = pair.sec;
    return pair;
}

Signature KeyedHashCrypto::sign(std::span<const std::uint8_t> message, const SecretKey& key,
                                NodeId signer) const {
    return Signature{signer, tag_for(key, message)};
}

bool KeyedHashCrypto::verify(std::span<const std::uint8_t> message, const Signature& sig,
                             const PublicKey& key) const {
    auto it = registry_.find(key.id);
    if (it == registry_.end()) return false;
    return tag_for(it->second, message) == sig.tag;
}

KeyRing make_key_ring(CryptoScheme& scheme, NodeId node, std::uint64_t master_seed) {
    RandomField field(master_seed);
    KeyRing ring;
    ring.leader = scheme.generate(field.value(rng_tag("key-leader"), node.value));
    ring.follower = scheme.generate(field.value(rng_tag("key-follower"), node.value));
    return ring;
}

} // namespace wbft
