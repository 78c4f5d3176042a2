#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wbft/ids.hpp"
#include "wbft/rng.hpp"

namespace wbft {

// Raw evaluation scores: one row per volunteer, one column per node, values
// in [0, 100].
struct ScoreMatrix {
    std::vector<NodeId> nodes;
    std::vector<std::string> node_names; // optional, parallel to nodes
    std::vector<std::vector<double>> rows;

    std::vector<double> column_means() const;
};

using WeightMap = std::map<NodeId, double>;

struct QualityWeights {
    WeightMap a;
};

struct TrustWeights {
    WeightMap b;
};

struct CompositeWeights {
    WeightMap w;
    double alpha = 0.5;
    double beta = 0.5;

    double at(NodeId id) const;
};

enum class StdDevConvention {
    sample,     // divide by n-1; tracks the published standardization row best
    population, // divide by n
};

// Per-node column mean -> z-score against the cross-node mean -> standard
// normal CDF value in (0, 1). Adding a constant to every score leaves the
// output unchanged. Throws std::invalid_argument when all means coincide
// (degenerate variance).
std::map<NodeId, double> standardize_scores(
    const ScoreMatrix& scores, StdDevConvention convention = StdDevConvention::sample);

// A_j = q_j / sum(q); all inputs must be positive.
QualityWeights quality_weights(const std::map<NodeId, double>& quality_scores);

// B_j = t_j / sum(t); all inputs must be positive.
TrustWeights trust_weights(const std::map<NodeId, double>& trust_scores);

// W_j = alpha * A_j + beta * B_j with alpha + beta = 1 over a common node set.
CompositeWeights composite_weights(const QualityWeights& quality, const TrustWeights& trust,
                                   double alpha, double beta);

// Draws n trust values from normal(mean, variance), rejecting draws outside
// (0, 1), then normalizes the vector to sum 1. Deterministic given the seed.
// Throws std::runtime_error after bounded redraws (infeasible parameters).
TrustWeights sample_trust_weights(std::uint32_t n, double mean, double variance,
                                  std::uint64_t seed);

// Also returns the accepted raw draws (before normalization); used by tests
// that measure the truncation effect.
TrustWeights sample_trust_weights(std::uint32_t n, double mean, double variance,
                                  std::uint64_t seed, std::vector<double>& raw_out);

// What a node observed about one peer during a consensus round.
struct RoundEvidence {
    bool participated = false;    // produced a verifiable message this round
    bool caught_invalid = false;  // bad signature, digest mismatch or bad proof
    bool silent = false;          // expected to respond but never arrived
    bool contradicted = false;    // vote disagrees with the observer's own comparison
    int quality_outcome = 0;      // +1 won the quality comparison, -1 lost, 0 tie/unseen
};

struct RecalibrationParams {
    double penalty = 0.5;              // trust multiplier on provable violations
    double silence_penalty = 0.9;      // milder; silence can be innocent channel loss
    double contradiction_penalty = 0.85; // unprovable but suspicious voting
    double reward = 1.02;              // trust multiplier on honest participation
    double ema_smoothing = 0.2;        // quality EMA step
    double floor_value = 1e-6;         // raw scores never collapse to 0 or explode to 1
};

// Mutable per-initiator view of every peer: raw quality and trust scores that
// get renormalized into weights each round.
class WeightState {
public:
    WeightState() = default;
    WeightState(std::map<NodeId, double> quality_scores, std::map<NodeId, double> trust_scores,
                double alpha, double beta);

    CompositeWeights weights() const;

    // Restriction to a participant subset, renormalized to sum 1.
    CompositeWeights weights_over(const std::vector<NodeId>& participants) const;

    const std::map<NodeId, double>& quality_scores() const { return quality_; }
    const std::map<NodeId, double>& trust_scores() const { return trust_; }

    void recalibrate(const std::map<NodeId, RoundEvidence>& evidence,
                     const RecalibrationParams& params = {});

private:
    std::map<NodeId, double> quality_;
    std::map<NodeId, double> trust_;
    double alpha_ = 0.5;
    double beta_ = 0.5;
};

} // namespace wbft
