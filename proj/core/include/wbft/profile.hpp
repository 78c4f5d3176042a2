#pragma once

#include <string>
#include <vector>

#include "wbft/crypto.hpp"
#include "wbft/ids.hpp"

namespace wbft {

enum class ByzantineBehavior { none, bad_vote, invalid_proof, fake_response, silent };

const char* to_string(ByzantineBehavior behavior);

// A mock responder node standing in for one LLM: a quality distribution, a
// trust parameter, optional Byzantine behaviors and its two key pairs.
struct LlmProfile {
    NodeId node{};
    std::string name;
    double quality_mean = 80.0;   // [0, 100]
    double quality_stddev = 5.0;
    double trust_param = 0.1;     // (0, 1)
    std::vector<ByzantineBehavior> behaviors; // empty means honest
    bool cycle_behaviors = true;  // rotate through the list per round
    double activation_prob = 1.0; // chance a behavior fires in a given round
    KeyRing keys;

    bool honest() const { return behaviors.empty(); }

    // The behavior configured for a given round (activation is decided by the
    // caller's random draw).
    ByzantineBehavior behavior_for_round(std::uint64_t round) const;
};

} // namespace wbft
