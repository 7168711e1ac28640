#pragma once

#include <cmath>
#include <cstdint>

#include "chainsim/blocks.hpp"
#include "chainsim/errors.hpp"
#include "chainsim/ids.hpp"
#include "chainsim/rng.hpp"

namespace chainsim::btc {

// Difficulty is uniform: a miner's chance of finding a block in one step is
// its share of total power spread over the target interval.
struct MinerParams {
    double mine_power = 0;        // this node's absolute power
    double total_mine_power = 1;  // power of the whole universe, incl. absent miners
    Step block_interval_steps = 1;
};

inline double mining_probability(const MinerParams& m) {
    if (m.total_mine_power <= 0)
        throw InvalidParams("total_mine_power must be positive");
    if (m.mine_power < 0)
        throw InvalidParams("mine_power must be >= 0");
    if (m.block_interval_steps < 1)
        throw InvalidParams("block_interval_steps must be >= 1");
    const double p = m.mine_power /
                     (static_cast<double>(m.block_interval_steps) * m.total_mine_power);
    if (p > 1.0)
        throw InvalidParams("per-step mining probability exceeds 1; "
                            "lower mine_power or raise the interval");
    return p;
}

// one Bernoulli trial; the caller draws exactly once per step
inline bool try_mine(RngStream& mine_rng, double p_per_step) {
    return mine_rng.next_bernoulli(p_per_step);
}

// block payload distributions (means/stddevs measured off the real network,
// fed in through the config so they stay replaceable)
struct TxParams {
    double count_mean = 2104.72;
    double count_std = 236.63;
    double size_mean = 615.32;
    double size_std = 89.43;
};

inline Transaction sample_transaction(RngStream& size_rng, const TxParams& tx) {
    const double s = std::round(size_rng.next_normal(tx.size_mean, tx.size_std));
    return Transaction{s < 1 ? 1 : static_cast<std::uint64_t>(s)};
}

inline std::uint32_t sample_tx_count(RngStream& count_rng, const TxParams& tx) {
    const double c = std::round(count_rng.next_normal(tx.count_mean, tx.count_std));
    return c < 0 ? 0 : static_cast<std::uint32_t>(c);
}

// A freshly mined block on `parent`: tx count and every tx size are drawn from
// the node's own streams, so block weights never depend on scheduling.
inline BlockPtr create_block(const BlockPtr& parent, NodeId miner, ItemId id,
                             Step now, RngStream& count_rng, RngStream& size_rng,
                             const TxParams& tx, std::uint32_t header_bytes) {
    auto b = std::make_shared<Block>();
    b->parent = parent->id();
    b->height = parent->height + 1;
    b->tx_count = sample_tx_count(count_rng, tx);
    for (std::uint32_t i = 0; i < b->tx_count; ++i)
        b->tx_bytes += sample_transaction(size_rng, tx).size_bytes;
    b->item = engine::Item{id, miner, now, header_bytes + b->tx_bytes};
    return b;
}

} // namespace chainsim::btc
