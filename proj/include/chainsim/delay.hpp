#pragma once

#include <cmath>
#include <cstdint>

#include "chainsim/errors.hpp"
#include "chainsim/ids.hpp"
#include "chainsim/regions.hpp"

namespace chainsim::net {

// Link delay between two nodes:
//
//   seconds = latency_ms / 1000 + size_bytes / (min(up_sender, down_recipient) * 1e6)
//
// The effective bandwidth is the bottleneck of the sender's upload and the
// recipient's download, in decimal megabytes per second.
inline double delay_seconds(double latency_ms, std::uint64_t size_bytes,
                            double upload_sender_mbps,
                            double download_recipient_mbps) {
    const double bw = std::min(upload_sender_mbps, download_recipient_mbps);
    if (bw <= 0) throw InvalidParams("link bandwidth must be positive");
    if (latency_ms < 0) throw InvalidParams("latency must be >= 0");
    return latency_ms / 1000.0 +
           static_cast<double>(size_bytes) / (bw * 1e6);
}

// Seconds to whole steps, rounding up, never below 1.
//
// The ceiling snaps to the nearest integer first: 0.1 s latency plus a 0.2 s
// transfer is 0.30000000000000004 in binary floating point, and a naive ceil
// would charge a fourth step for an exact three-step delay.
inline Step delay_to_steps(double seconds, double seconds_per_step) {
    if (seconds_per_step <= 0)
        throw InvalidParams("seconds_per_step must be positive");
    const double ratio = seconds / seconds_per_step;
    const double nearest = std::round(ratio);
    double steps;
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, std::abs(ratio)))
        steps = nearest;
    else
        steps = std::ceil(ratio);
    if (steps < 1) return 1;
    return static_cast<Step>(steps);
}

inline Step compute_delay_steps(const Region& sender, const Region& recipient,
                                double latency_ms, std::uint64_t size_bytes,
                                double seconds_per_step) {
    return delay_to_steps(delay_seconds(latency_ms, size_bytes,
                                        sender.upload_mbps,
                                        recipient.download_mbps),
                          seconds_per_step);
}

} // namespace chainsim::net
