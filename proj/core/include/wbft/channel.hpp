#pragma once

#include <cstdint>

namespace wbft {

// Finite-blocklength wireless link model. Bandwidth, capacity and rate come
// in physical units; inside the success formula capacity and rate are used
// as spectral efficiencies (C/B and R/B bits per channel use) and N*T*B is
// the blocklength in channel uses. Logarithms are base 2.
struct ChannelParams {
    double bandwidth_hz = 15000.0;
    double capacity_bps = 15000.0;
    double rate_bps = 10000.0;
    double subcarriers = 1.0;
    double slot_seconds = 0.005; // T

    double blocklength() const { return subcarriers * slot_seconds * bandwidth_hz; }
};

// P_l = Phi(arg) with
//   arg = (x*(C/B - R/B) + log2(x)/2) / (log2(e) * sqrt(x)),  x = N*T*B.
// Throws std::invalid_argument on non-positive parameters.
double channel_success_prob(const ChannelParams& params);

// Bisection on T over [1e-7, 10] s to |P_l(T) - target| < 1e-9. The argument
// must be monotone in T over the operating regime (checked analytically up
// front; throws std::domain_error otherwise). Throws std::out_of_range when
// the target is unreachable within the bracket.
double solve_channel_latency(double target_pl, const ChannelParams& params_without_t);

// Per-consensus latency: two phases, each one downlink slot plus
// one uplink slot per follower, totalling 2 n T for n voting participants.
double phase_latency(std::uint32_t participants, double slot_seconds);

} // namespace wbft
