#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace wbft {

// All randomness in a scenario derives from one master seed. Two generators
// are provided:
//
//  - RandomField: stateless, addressed draws. A draw is keyed by a tag and up
//    to four coordinates (request, attempt, node, ...). Two scenarios that
//    share a seed sample identical values at identical addresses no matter
//    how many other draws happen in between. Paired-seed mode comparisons
//    (e.g. PBFT vs VaaP) rely on this.
//
//  - SplitMix: a tiny sequential generator for loops where addressing has no
//    meaning (k-means seeding, rejection sampling). Streams are derived from
//    the master seed plus a tag so independent consumers never overlap.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// FNV-1a over a string literal; used to turn draw-purpose names into keys.
constexpr std::uint64_t rng_tag(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal(double mean, double stddev) {
        double u1 = uniform_pos();
        double u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    std::uint64_t below(std::uint64_t bound) {
        return next() % bound;
    }

private:
    std::uint64_t state_;
};

class RandomField {
public:
    explicit RandomField(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t value(std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0,
                        std::uint64_t c = 0, std::uint64_t d = 0) const {
        std::uint64_t h = splitmix64(seed_ ^ tag);
        h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ull));
        h = splitmix64(h ^ (b + 0x7f4a7c159e3779b9ull));
        h = splitmix64(h ^ (c + 0xc15f9e3779b97a4full));
        h = splitmix64(h ^ (d + 0x3779b97f4a7c159ell));
        return h;
    }

    double uniform(std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0,
                   std::uint64_t c = 0, std::uint64_t d = 0) const {
        return static_cast<double>(value(tag, a, b, c, d) >> 11) * 0x1.0p-53;
    }

    double normal(std::uint64_t tag, double mean, double stddev, std::uint64_t a = 0,
                  std::uint64_t b = 0, std::uint64_t c = 0, std::uint64_t d = 0) const {
        double u1 = (static_cast<double>(value(tag, a, b, c, d) >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(value(tag ^ 0x517cc1b727220a95ull, a, b, c, d) >> 11) *
                    0x1.0p-53;
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    // Derives a stream seed for a sequential SplitMix consumer.
    std::uint64_t stream(std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) const {
        return value(tag ^ 0xa0761d6478bd642full, a, b);
    }

private:
    std::uint64_t seed_;
};

} // namespace wbft
