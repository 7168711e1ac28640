#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace chainsim {

// Deterministic random stream, derived from (master_seed, node_id, purpose).
//
// Every consumer of randomness owns its own stream: a node's mining draws, its
// transaction sampling and the topology builder never share state, so the
// sequence each one sees depends only on the three derivation inputs and how
// often that consumer itself has drawn. That property is what makes the
// simulation invariant under node-iteration order.
//
// The generator is xoshiro256** seeded through splitmix64. Both are pure
// integer arithmetic, so identical inputs give identical sequences on any
// platform; the standard library's engines would too, but its distributions
// are implementation-defined, hence the hand-rolled normal/bounded draws below.
class RngStream {
  public:
    static RngStream derive(std::uint64_t master_seed, std::uint32_t node_id,
                            std::string_view purpose) {
        std::uint64_t x = master_seed;
        x = mix(x ^ fnv1a(purpose));
        x = mix(x ^ (static_cast<std::uint64_t>(node_id) + 0x9e3779b97f4a7c15ULL));
        RngStream s;
        std::uint64_t sm = x;
        for (auto& word : s.state_) word = splitmix_next(sm);
        // all-zero state is the one fixed point xoshiro cannot leave
        if ((s.state_[0] | s.state_[1] | s.state_[2] | s.state_[3]) == 0)
            s.state_[0] = 0x9e3779b97f4a7c15ULL;
        return s;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53 significant bits
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // one uniform draw; always consumes exactly one u64 regardless of p
    bool next_bernoulli(double p) { return next_unit() < p; }

    // uniform in [0, n), unbiased via rejection
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);
        return r;
    }

    // Box-Muller transform; consumes exactly two u64 per call (no cached spare,
    // so the draw count per call is fixed and reproducible)
    double next_normal(double mean, double stddev) {
        // u1 in (0, 1] keeps the log finite
        const double u1 =
            (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_unit();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    static constexpr std::uint64_t splitmix_next(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace chainsim
