#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>

#include "wbft/digest.hpp"
#include "wbft/ids.hpp"

namespace wbft {

// Simulation-grade authenticity. Keys are opaque 32-byte values; the default
// scheme tags a message with digest(secret || message). The scheme is
// pluggable so a real signature suite could be dropped in behind the same
// surface. Secret halves never appear inside any serialized message.

struct PublicKey {
    Digest id{};
    constexpr auto operator<=>(const PublicKey&) const = default;
};

struct SecretKey {
    std::array<std::uint8_t, 32> bytes{};
};

struct KeyPair {
    PublicKey pub;
    SecretKey sec;
};

// Every node carries one pair for its leader role and one for its follower
// role; the two are always distinct.
struct KeyRing {
    KeyPair leader;
    KeyPair follower;
};

struct Signature {
    NodeId signer{};
    Digest tag{};
    constexpr auto operator<=>(const Signature&) const = default;
};

class CryptoScheme {
public:
    virtual ~CryptoScheme() = default;

    virtual KeyPair generate(std::uint64_t seed_material) = 0;
    virtual Signature sign(std::span<const std::uint8_t> message, const SecretKey& key,
                           NodeId signer) const = 0;
    virtual bool verify(std::span<const std::uint8_t> message, const Signature& sig,
                        const PublicKey& key) const = 0;
};

// Keyed-hash message tags. Verification resolves the public key to the
// registered secret; a party that never generated or received a secret cannot
// produce a tag that verifies against someone else's key.
class KeyedHashCrypto final : public CryptoScheme {
public:
    KeyPair generate(std::uint64_t seed_material) override;
    Signature sign(std::span<const std::uint8_t> message, const SecretKey& key,
                   NodeId signer) const override;
    bool verify(std::span<const std::uint8_t> message, const Signature& sig,
                const PublicKey& key) const override;

private:
    std::unordered_map<Digest, SecretKey> registry_;
};

KeyRing make_key_ring(CryptoScheme& scheme, NodeId node, std::uint64_t master_seed);

} // namespace wbft
