#include "wbft/hsc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wbft/rng.hpp"

namespace wbft {
namespace {

constexpr double kLatencyFloor = 1e-6;

double dist2(const FeatureVector& a, const FeatureVector& b) {
    double dt = a.trust_component - b.trust_component;
    double dl = a.latency_component - b.latency_component;
    return dt * dt + dl * dl;
}

struct Points {
    std::vector<NodeId> ids;
    std::vector<FeatureVector> pts;
    std::vector<double> member_weight; // (T/Lhat)^gamma
};

Points collect(const std::map<NodeId, FeatureVector>& vectors,
               const std::map<NodeId, double>& trust,
               const std::map<NodeId, double>& latency_seconds, double gamma) {
    Points p;
    std::map<NodeId, double> lhat = normalized_latency(latency_seconds);
    for (const auto& [id, vec] : vectors) {
        p.ids.push_back(id);
        p.pts.push_back(vec);
        double t = trust.at(id);
        double l = std::max(lhat.at(id), kLatencyFloor);
        p.member_weight.push_back(std::pow(t / l, gamma));
    }
    return p;
}

// k-means++ D^2 seeding.
std::vector<FeatureVector> seed_centroids(const Points& p, std::uint32_t k, SplitMix& rng) {
    std::vector<FeatureVector> centroids;
    centroids.push_back(p.pts[std::size_t(rng.below(p.pts.size()))]);
    std::vector<double> d2(p.pts.size(), 0.0);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < p.pts.size(); ++i) {
            double best = std::numeric_limits<double>::max();
            for (const auto& c : centroids) best = std::min(best, dist2(p.pts[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = std::size_t(rng.below(p.pts.size()));
        } else {
            double r = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < p.pts.size(); ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(p.pts[pick]);
    }
    return centroids;
}

struct KMeansResult {
    std::vector<std::uint32_t> assignment;
    std::vector<FeatureVector> centroids;
    double wcss = 0.0;
};

KMeansResult kmeans_once(const Points& p, std::uint32_t k, double gamma, int max_iterations,
                         SplitMix& rng) {
    KMeansResult res;
    res.centroids = seed_centroids(p, k, rng);
    res.assignment.assign(p.pts.size(), 0);

    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < p.pts.size(); ++i) {
            std::uint32_t best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (std::uint32_t c = 0; c < k; ++c) {
                double d = dist2(p.pts[i], res.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }

        // Repair empty clusters by reseeding at the point farthest from its
        // assigned centroid.
        for (std::uint32_t c = 0; c < k; ++c) {
            bool empty = true;
            for (auto a : res.assignment)
                if (a == c) {
                    empty = false;
                    break;
                }
            if (!empty) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < p.pts.size(); ++i) {
                double d = dist2(p.pts[i], res.centroids[res.assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            res.centroids[c] = p.pts[far];
            res.assignment[far] = c;
            changed = true;
        }

        // Weighted centroid update; gamma = 0 reduces to the plain mean.
        for (std::uint32_t c = 0; c < k; ++c) {
            double wsum = 0.0, tsum = 0.0, lsum = 0.0;
            for (std::size_t i = 0; i < p.pts.size(); ++i) {
                if (res.assignment[i] != c) continue;
                double w = (gamma == 0.0) ? 1.0 : p.member_weight[i];
                wsum += w;
                tsum += w * p.pts[i].trust_component;
                lsum += w * p.pts[i].latency_component;
            }
            if (wsum > 0.0) res.centroids[c] = FeatureVector{tsum / wsum, lsum / wsum};
        }

        if (!changed && iter > 0) break;
    }

    for (std::size_t i = 0; i < p.pts.size(); ++i)
        res.wcss += dist2(p.pts[i], res.centroids[res.assignment[i]]);
    return res;
}

KMeansResult kmeans_best(const Points& p, std::uint32_t k, const HscParams& params,
                         std::uint64_t seed) {
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::max();
    for (int r = 0; r < std::max(1, params.restarts); ++r) {
        SplitMix rng(splitmix64(seed ^ rng_tag("kmeans") ^ (std::uint64_t(k) << 32) ^
                                std::uint64_t(r)));
        KMeansResult run = kmeans_once(p, k, params.gamma, params.max_iterations, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return best;
}

double auto_lambda(double wcss1, std::uint32_t k_max) {
    // Scale-free default: 1% of the K=1 spread per allowed cluster.
    return 0.01 * wcss1 / double(std::max<std::uint32_t>(k_max, 1));
}

} // namespace

bool Clustering::is_ccn(NodeId id) const {
    return std::find(ccns.begin(), ccns.end(), id) != ccns.end();
}

std::map<NodeId, double> normalized_latency(const std::map<NodeId, double>& latency_seconds) {
    std::map<NodeId, double> out;
    if (latency_seconds.empty()) return out;
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (const auto& [id, l] : latency_seconds) {
        if (l <= 0.0) throw std::invalid_argument("latency must be positive");
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    for (const auto& [id, l] : latency_seconds)
        out[id] = (hi > lo) ? (l - lo) / (hi - lo) : 0.5;
    return out;
}

std::map<NodeId, FeatureVector> feature_vectors(const std::map<NodeId, double>& trust,
                                                const std::map<NodeId, double>& latency_seconds,
                                                double omega) {
    if (trust.size() != latency_seconds.size())
        throw std::invalid_argument("feature_vectors: node sets differ");
    std::map<NodeId, double> lhat = normalized_latency(latency_seconds);
    std::map<NodeId, FeatureVector> out;
    for (const auto& [id, t] : trust)
        out[id] = FeatureVector{omega * t, (1.0 - omega) * lhat.at(id)};
    return out;
}

double wcss_of(const std::map<NodeId, FeatureVector>& vectors,
               const std::map<NodeId, std::uint32_t>& assignment,
               const std::vector<FeatureVector>& centroids) {
    double total = 0.0;
    for (const auto& [id, vec] : vectors) total += dist2(vec, centroids[assignment.at(id)]);
    return total;
}

std::uint32_t choose_k(const std::map<NodeId, FeatureVector>& vectors, const HscParams& params,
                       std::uint64_t seed) {
    if (vectors.size() < 2) return std::uint32_t(vectors.size());
    // Dummy trust/latency: choose_k only compares unweighted tightness, the
    // gamma weighting enters at the final clustering.
    std::map<NodeId, double> ones, lat;
    for (const auto& [id, v] : vectors) {
        (void)v;
        ones[id] = 1.0;
        lat[id] = 1.0;
    }
    HscParams flat = params;
    flat.gamma = 0.0;
    Points p = collect(vectors, ones, lat, 0.0);

    std::uint32_t k_max = std::min<std::uint32_t>(params.k_max, std::uint32_t(vectors.size()));
    if (k_max < 1) k_max = 1;

    std::vector<double> wcss(k_max + 1, 0.0);
    for (std::uint32_t k = 1; k <= k_max; ++k) wcss[k] = kmeans_best(p, k, flat, seed).wcss;

    if (wcss[1] <= 1e-12) return 1; // all points identical

    double lambda = params.lambda_penalty >= 0.0 ? params.lambda_penalty
                                                 : auto_lambda(wcss[1], params.k_max);
    std::vector<double> J(k_max + 1, 0.0);
    for (std::uint32_t k = 1; k <= k_max; ++k) J[k] = wcss[k] + lambda * double(k);

    if (k_max == 1) return 1;
    if (k_max == 2) return J[2] < J[1] ? 2 : 1;

    std::uint32_t best_k = 2;
    double best_curve = -std::numeric_limits<double>::max();
    for (std::uint32_t k = 2; k + 1 <= k_max; ++k) {
        double curve = J[k - 1] - 2.0 * J[k] + J[k + 1];
        if (curve > best_curve + 1e-15) {
            best_curve = curve;
            best_k = k;
        }
    }
    return best_k;
}

std::vector<NodeId> select_ccns(const std::map<NodeId, std::uint32_t>& assignment,
                                std::uint32_t k, const std::map<NodeId, double>& trust,
                                const std::map<NodeId, double>& latency_seconds, double gamma) {
    std::map<NodeId, double> lhat = normalized_latency(latency_seconds);
    std::vector<NodeId> ccns(k, NodeId{0});
    std::vector<bool> seen(k, false);
    for (const auto& [id, c] : assignment) {
        double t = trust.at(id);
        double l = std::max(lhat.at(id), kLatencyFloor);
        double score = std::pow(t / l, gamma);
        if (!seen[c]) {
            ccns[c] = id;
            seen[c] = true;
            continue;
        }
        NodeId cur = ccns[c];
        double ct = trust.at(cur);
        double cl = std::max(lhat.at(cur), kLatencyFloor);
        double cscore = std::pow(ct / cl, gamma);
        bool better = score > cscore;
        if (score == cscore) {
            if (t != ct) better = t > ct;
            else if (l != cl) better = l < cl;
            else better = id < cur;
        }
        if (better) ccns[c] = id;
    }
    return ccns;
}

Clustering cluster(const std::map<NodeId, FeatureVector>& vectors,
                   const std::map<NodeId, double>& trust,
                   const std::map<NodeId, double>& latency_seconds, const HscParams& params,
                   std::uint32_t k, std::uint64_t seed) {
    if (k == 0 || k > vectors.size())
        throw std::invalid_argument("cluster: K must be in [1, node count]");
    Points p = collect(vectors, trust, latency_seconds, params.gamma);
    KMeansResult best = kmeans_best(p, k, params, seed);

    Clustering out;
    out.k = k;
    out.centroids = std::move(best.centroids);
    out.wcss = best.wcss;
    for (std::size_t i = 0; i < p.ids.size(); ++i) out.assignment[p.ids[i]] = best.assignment[i];
    out.ccns = select_ccns(out.assignment, k, trust, latency_seconds, params.gamma);
    return out;
}

Clustering run_hsc(const std::map<NodeId, double>& trust,
                   const std::map<NodeId, double>& latency_seconds, const HscParams& params,
                   std::uint64_t seed) {
    auto vectors = feature_vectors(trust, latency_seconds, params.omega);
    std::uint32_t k = choose_k(vectors, params, seed);
    return cluster(vectors, trust, latency_seconds, params, k, seed);
}

} // namespace wbft
