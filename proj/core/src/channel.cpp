#include "wbft/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wbft/normal.hpp"

namespace wbft {
namespace {

constexpr double kTMin = 1e-7;
constexpr double kTMax = 10.0;
constexpr double kLog2E = 1.4426950408889634;

void check_params(const ChannelParams& p, bool require_gap) {
    if (p.bandwidth_hz <= 0.0 || p.capacity_bps <= 0.0 || p.rate_bps <= 0.0 ||
        p.subcarriers < 1.0 || p.slot_seconds <= 0.0)
        throw std::invalid_argument("channel: all parameters must be positive, N >= 1");
    if (p.capacity_bps < p.rate_bps)
        throw std::invalid_argument("channel: rate exceeds capacity");
    if (require_gap && p.capacity_bps <= p.rate_bps)
        throw std::invalid_argument("channel: usable channel requires C > R");
}

double q_argument(double x, double delta) {
    return (x * delta + std::log2(x) / 2.0) / (kLog2E * std::sqrt(x));
}

// d(arg)/dx has the sign of h(x) = x*delta + 1/ln2 - ln(x)/(2 ln2), whose
// minimum sits at x* = 1/(2 delta ln2).
bool argument_monotone(double delta, double x_lo, double x_hi) {
    const double ln2 = std::numbers::ln2;
    auto h = [&](double x) { return x * delta + 1.0 / ln2 - std::log(x) / (2.0 * ln2); };
    double x_star = 1.0 / (2.0 * delta * ln2);
    double probe = std::clamp(x_star, x_lo, x_hi);
    return h(probe) > 0.0 && h(x_lo) > 0.0 && h(x_hi) > 0.0;
}

} // namespace

double channel_success_prob(const ChannelParams& params) {
    check_params(params, /*require_gap=*/false);
    double x = params.blocklength();
    double delta = (params.capacity_bps - params.rate_bps) / params.bandwidth_hz;
    return normal_cdf(q_argument(x, delta));
}

double solve_channel_latency(double target_pl, const ChannelParams& params_without_t) {
    ChannelParams p = params_without_t;
    p.slot_seconds = kTMin;
    check_params(p, /*require_gap=*/true);
    double delta = (p.capacity_bps - p.rate_bps) / p.bandwidth_hz;
    double x_lo = p.subcarriers * kTMin * p.bandwidth_hz;
    double x_hi = p.subcarriers * kTMax * p.bandwidth_hz;
    if (!argument_monotone(delta, x_lo, x_hi))
        throw std::domain_error("solve_channel_latency: success probability is not monotone "
                                "in T for these parameters");

    double pl_lo = channel_success_prob(p);
    p.slot_seconds = kTMax;
    double pl_hi = channel_success_prob(p);
    if (!(target_pl > pl_lo && target_pl < pl_hi))
        throw std::out_of_range("solve_channel_latency: target outside reachable range");

    double lo = kTMin, hi = kTMax;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        p.slot_seconds = mid;
        double pl = channel_success_prob(p);
        if (std::fabs(pl - target_pl) < 1e-9) return mid;
        if (pl < target_pl)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double phase_latency(std::uint32_t participants, double slot_seconds) {
    if (participants < 1) throw std::invalid_argument("phase_latency: need participants >= 1");
    return 2.0 * double(participants) * slot_seconds;
}

} // namespace wbft
