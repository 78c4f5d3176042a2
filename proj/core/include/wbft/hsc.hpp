#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wbft/ids.hpp"

namespace wbft {

// Trust/latency feature point. Both components live in [0, 1]: trust is
// already dimensionless and latency is min-max normalized per round before
// the omega split (the raw metric would otherwise be scale-dependent).
struct FeatureVector {
    double trust_component = 0.0;
    double latency_component = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

struct HscParams {
    double omega = 0.5;          // trust vs latency proportion in the feature
    double gamma = 1.0;          // nonlinear (T/L)^gamma centroid weighting
    double lambda_penalty = -1;  // per-cluster penalty; negative = auto scale
    std::uint32_t k_max = 6;
    int restarts = 4;            // k-means++ restarts per candidate K
    int max_iterations = 100;
};

struct Clustering {
    std::uint32_t k = 0;
    std::map<NodeId, std::uint32_t> assignment;
    std::vector<FeatureVector> centroids;
    std::vector<NodeId> ccns; // one per cluster, same index as centroids
    double wcss = 0.0;

    bool is_ccn(NodeId id) const;
};

// Eq-style feature build: [omega * T, (1 - omega) * Lhat] with Lhat the
// min-max normalized latency. All-equal latencies normalize to 0.5.
std::map<NodeId, FeatureVector> feature_vectors(const std::map<NodeId, double>& trust,
                                                const std::map<NodeId, double>& latency_seconds,
                                                double omega);

// Normalized latencies used by the CCN rule; same normalization as above,
// clamped below by 1e-6 so ratios stay finite.
std::map<NodeId, double> normalized_latency(const std::map<NodeId, double>& latency_seconds);

// Penalized objective J(K) = WCSS(K) + lambda * K evaluated over K = 1..k_max
// (each WCSS from a converged run); the elbow is the K with the largest
// second difference J(K-1) - 2 J(K) + J(K+1), ties toward smaller K.
std::uint32_t choose_k(const std::map<NodeId, FeatureVector>& vectors, const HscParams& params,
                       std::uint64_t seed);

// Weighted k-means: k-means++ seeding, nearest-centroid assignment, centroid
// update as the (T/Lhat)^gamma weighted member mean. Empty clusters reseed at
// the farthest point. Deterministic given (inputs, seed).
Clustering cluster(const std::map<NodeId, FeatureVector>& vectors,
                   const std::map<NodeId, double>& trust,
                   const std::map<NodeId, double>& latency_seconds, const HscParams& params,
                   std::uint32_t k, std::uint64_t seed);

// Per cluster, the member maximizing (T/Lhat)^gamma; ties broken by higher
// trust, then lower normalized latency, then lower node id.
std::vector<NodeId> select_ccns(const std::map<NodeId, std::uint32_t>& assignment,
                                std::uint32_t k, const std::map<NodeId, double>& trust,
                                const std::map<NodeId, double>& latency_seconds, double gamma);

// Convenience: choose_k + cluster with the same inputs and seed.
Clustering run_hsc(const std::map<NodeId, double>& trust,
                   const std::map<NodeId, double>& latency_seconds, const HscParams& params,
                   std::uint64_t seed);

double wcss_of(const std::map<NodeId, FeatureVector>& vectors,
               const std::map<NodeId, std::uint32_t>& assignment,
               const std::vector<FeatureVector>& centroids);

} // namespace wbft
