#include "wbft/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "wbft/normal.hpp"

namespace wbft {
namespace {

WeightMap normalized(const std::map<NodeId, double>& values, const char* what) {
    double sum = 0.0;
    for (const auto& [id, v] : values) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string(what) + ": non-positive score for node " +
                                        std::to_string(id.value));
        }
        sum += v;
    }
    if (values.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
    WeightMap out;
    for (const auto& [id, v] : values) out[id] = v / sum;
    return out;
}

} // namespace

std::vector<double> ScoreMatrix::column_means() const {
    std::vector<double> means(nodes.size(), 0.0);
    if (rows.empty()) return means;
    for (const auto& row : rows) {
        if (row.size() != nodes.size())
            throw std::invalid_argument("score matrix: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c) means[c] += row[c];
    }
    for (auto& m : means) m /= double(rows.size());
    return means;
}

double CompositeWeights::at(NodeId id) const {
    auto it = w.find(id);
    return it == w.end() ? 0.0 : it->second;
}

std::map<NodeId, double> standardize_scores(const ScoreMatrix& scores,
                                            StdDevConvention convention) {
    if (scores.nodes.size() < 2)
        throw std::invalid_argument("standardize_scores: need at least two nodes");
    if (scores.rows.empty())
        throw std::invalid_argument("standardize_scores: need at least one volunteer row");
    std::vector<double> means = scores.column_means();

    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= double(means.size());

    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    double denom = convention == StdDevConvention::sample ? double(means.size()) - 1.0
                                                          : double(means.size());
    double var = ss / denom;
    if (var <= 0.0)
        throw std::invalid_argument("standardize_scores: degenerate variance, all means equal");
    double sd = std::sqrt(var);

    std::map<NodeId, double> out;
    for (std::size_t c = 0; c < means.size(); ++c)
        out[scores.nodes[c]] = normal_cdf((means[c] - grand) / sd);
    return out;
}

QualityWeights quality_weights(const std::map<NodeId, double>& quality_scores) {
    return QualityWeights{normalized(quality_scores, "quality_weights")};
}

TrustWeights trust_weights(const std::map<NodeId, double>& trust_scores) {
    return TrustWeights{normalized(trust_scores, "trust_weights")};
}

CompositeWeights composite_weights(const QualityWeights& quality, const TrustWeights& trust,
                                   double alpha, double beta) {
    if (std::fabs(alpha + beta - 1.0) > 1e-9)
        throw std::invalid_argument("composite_weights: alpha + beta must equal 1");
    if (quality.a.size() != trust.b.size())
        throw std::invalid_argument("composite_weights: node sets differ");
    CompositeWeights out;
    out.alpha = alpha;
    out.beta = beta;
    for (const auto& [id, a] : quality.a) {
        auto it = trust.b.find(id);
        if (it == trust.b.end())
            throw std::invalid_argument("composite_weights: node sets differ");
        out.w[id] = alpha * a + beta * it->second;
    }
    return out;
}

TrustWeights sample_trust_weights(std::uint32_t n, double mean, double variance,
                                  std::uint64_t seed) {
    std::vector<double> raw;
    return sample_trust_weights(n, mean, variance, seed, raw);
}

TrustWeights sample_trust_weights(std::uint32_t n, double mean, double variance,
                                  std::uint64_t seed, std::vector<double>& raw_out) {
    if (n == 0) throw std::invalid_argument("sample_trust_weights: n must be positive");
    if (variance < 0.0) throw std::invalid_argument("sample_trust_weights: negative variance");
    raw_out.clear();
    std::map<NodeId, double> values;
    if (variance == 0.0) {
        for (std::uint32_t i = 0; i < n; ++i) {
            values[NodeId{i}] = mean;
            raw_out.push_back(mean);
        }
        return trust_weights(values);
    }
    SplitMix rng(splitmix64(seed ^ rng_tag("trust-init")));
    const double sd = std::sqrt(variance);
    constexpr int kMaxRedraws = 100000;
    int redraws = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        double draw;
        do {
            draw = rng.normal(mean, sd);
            if (++redraws > kMaxRedraws)
                throw std::runtime_error("sample_trust_weights: rejection overflow, "
                                         "parameters leave (0,1) almost surely");
        } while (draw <= 0.0 || draw >= 1.0);
        values[NodeId{i}] = draw;
        raw_out.push_back(draw);
    }
    return trust_weights(values);
}

WeightState::WeightState(std::map<NodeId, double> quality_scores,
                         std::map<NodeId, double> trust_scores, double alpha, double beta)
    : quality_(std::move(quality_scores)), trust_(std::move(trust_scores)), alpha_(alpha),
      beta_(beta) {
    if (std::fabs(alpha_ + beta_ - 1.0) > 1e-9)
        throw std::invalid_argument("WeightState: alpha + beta must equal 1");
    if (quality_.size() != trust_.size())
        throw std::invalid_argument("WeightState: node sets differ");
}

CompositeWeights WeightState::weights() const {
    return composite_weights(quality_weights(quality_), trust_weights(trust_), alpha_, beta_);
}

CompositeWeights WeightState::weights_over(const std::vector<NodeId>& participants) const {
    std::map<NodeId, double> q, t;
    for (NodeId id : participants) {
        auto qi = quality_.find(id);
        auto ti = trust_.find(id);
        if (qi == quality_.end() || ti == trust_.end())
            throw std::invalid_argument("weights_over: unknown participant");
        q[id] = qi->second;
        t[id] = ti->second;
    }
    return composite_weights(quality_weights(q), trust_weights(t), alpha_, beta_);
}

void WeightState::recalibrate(const std::map<NodeId, RoundEvidence>& evidence,
                              const RecalibrationParams& params) {
    for (const auto& [id, ev] : evidence) {
        auto ti = trust_.find(id);
        auto qi = quality_.find(id);
        if (ti == trust_.end() || qi == quality_.end()) continue;

        double t = ti->second;
        if (ev.caught_invalid) {
            t *= params.penalty;
        } else if (ev.silent) {
            t *= params.silence_penalty;
        } else if (ev.contradicted) {
            t *= params.contradiction_penalty;
        } else if (ev.participated) {
            t *= params.reward;
        }
        ti->second = std::clamp(t, params.floor_value, 1.0 - params.floor_value);

        if (ev.quality_outcome != 0) {
            double target = ev.quality_outcome > 0 ? 1.0 : 0.0;
            double q = (1.0 - params.ema_smoothing) * qi->second +
                       params.ema_smoothing * target;
            qi->second = std::clamp(q, params.floor_value, 1.0 - params.floor_value);
        }
    }
}

} // namespace wbft
