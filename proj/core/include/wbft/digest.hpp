#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wbft {

using Bytes = std::vector<std::uint8_t>;

// 32-byte SHA-256 output. The all-zero digest is reserved as the genesis
// sentinel and is never produced for real content.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    constexpr auto operator<=>(const Digest&) const = default;

    static constexpr Digest zero() { return Digest{}; }
    bool is_zero() const;
    std::string hex() const;
};

Digest digest(std::span<const std::uint8_t> data);
Digest digest(std::string_view data);
Digest digest(const Bytes& data);

} // namespace wbft

template <>
struct std::hash<wbft::Digest> {
    std::size_t operator()(const wbft::Digest& d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[static_cast<std::size_t>(i)];
        return h;
    }
};
