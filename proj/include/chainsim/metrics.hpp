#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chainsim/errors.hpp"
#include "chainsim/event_log.hpp"
#include "chainsim/ids.hpp"

namespace chainsim::metrics {

// run facts the log alone does not carry; both the in-run report and a later
// recompute derive it from the same config, so the two reports match exactly
struct RunMeta {
    Step total_steps = 0;
    double seconds_per_step = 1.0;
    std::uint32_t node_count = 0;
    bool topology_connected = true;
    std::uint32_t topology_components = 1;
    bool operator==(const RunMeta&) const = default;
};

struct BlockInfo {
    ItemId id = 0;
    ItemId parent = 0;
    std::uint32_t height = 0;
    NodeId miner = kNoNode;
    Step created = 0;
    std::uint32_t tx_count = 0;
    std::uint64_t size_bytes = 0;
};

// every mined block, keyed by id; genesis is synthesized at id 0
inline std::unordered_map<ItemId, BlockInfo> block_table(const EventLog& events) {
    std::unordered_map<ItemId, BlockInfo> t;
    t.emplace(kGenesisId, BlockInfo{});
    for (const Event& e : events) {
        if (e.kind != EventKind::BlockMined) continue;
        const auto& m = std::get<MinedExtra>(e.extra);
        t.emplace(e.item, BlockInfo{e.item, m.parent, m.height, e.node, e.step,
                                    m.tx_count, m.size_bytes});
    }
    return t;
}

// The chain everyone would agree on given global knowledge: highest block,
// ties to the earliest-mined then the smallest id, walked back to genesis.
// Returned genesis-first. An empty log yields just the genesis entry.
inline std::vector<BlockInfo> main_chain(const EventLog& events) {
    auto table = block_table(events);
    const BlockInfo* best = &table.at(kGenesisId);
    for (const auto& [id, b] : table) {
        if (id == kGenesisId) continue;
        bool better = false;
        if (b.height != best->height) better = b.height > best->height;
        else if (b.created != best->created) better = b.created < best->created;
        else better = b.id < best->id;
        if (better) best = &b;
    }
    std::vector<BlockInfo> chain;
    for (const BlockInfo* cur = best;; cur = &table.at(cur->parent)) {
        chain.push_back(*cur);
        if (cur->id == kGenesisId) break;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

struct MetricsReport {
    double avg_block_interval_minutes = 0;
    double stale_rate_percent = 0;
    double d50_seconds = 0;
    double d90_seconds = 0;
    double d50_median_seconds = 0;
    double d90_median_seconds = 0;
    double tps = 0;

    std::uint64_t blocks_total = 0;
    std::uint64_t blocks_main = 0;
    std::uint64_t main_chain_height = 0;
    std::uint64_t total_tx_main = 0;
    std::uint64_t d50_blocks_measured = 0;
    std::uint64_t d50_blocks_unreached = 0;
    std::uint64_t d90_blocks_measured = 0;
    std::uint64_t d90_blocks_unreached = 0;

    // raw event counts
    std::uint64_t events_total = 0;
    std::uint64_t invs_sent = 0;
    std::uint64_t getdatas_sent = 0;
    std::uint64_t blocks_received = 0;
    std::uint64_t tip_changes = 0;

    // per miner: blocks mined / of those, blocks that ended up on the main chain
    std::map<NodeId, std::uint64_t> mined_by;
    std::map<NodeId, std::uint64_t> main_by;

    bool operator==(const MetricsReport&) const = default;
};

namespace detail {

// mean time (steps) for a block to reach ceil(pct% of nodes), miner included;
// blocks that never get there are excluded and counted separately
struct Reach {
    double mean_steps = 0;
    double median_steps = 0;
    std::uint64_t measured = 0;
    std::uint64_t unreached = 0;
};

inline Reach reach_time(
    const std::unordered_map<ItemId, BlockInfo>& table,
    const std::unordered_map<ItemId, std::vector<Step>>& arrivals,
    std::uint32_t node_count, std::uint32_t pct) {
    const std::uint64_t threshold =
        (static_cast<std::uint64_t>(pct) * node_count + 99) / 100; // ceil
    Reach r;
    std::vector<double> times;
    for (const auto& [id, b] : table) {
        if (id == kGenesisId) continue;
        auto it = arrivals.find(id);
        const std::size_t have = it == arrivals.end() ? 0 : it->second.size();
        if (have < threshold || threshold == 0) {
            ++r.unreached;
            continue;
        }
        // arrivals are already sorted
        const Step reached = it->second[threshold - 1];
        times.push_back(static_cast<double>(reached - b.created));
    }
    r.measured = times.size();
    if (!times.empty()) {
        double sum = 0;
        for (double t : times) sum += t;
        r.mean_steps = sum / static_cast<double>(times.size());
        std::sort(times.begin(), times.end());
        const std::size_t n = times.size();
        r.median_steps = n % 2 ? times[n / 2]
                               : (times[n / 2 - 1] + times[n / 2]) / 2.0;
    }
    return r;
}

} // namespace detail

inline MetricsReport compute_metrics(const EventLog& events, const RunMeta& meta) {
    MetricsReport rep;
    auto table = block_table(events);
    if (table.size() <= 1)
        throw EmptyRun("no blocks were mined; nothing to measure");

    // first arrival of each block at each node; mining counts as arrival
    std::unordered_map<ItemId, std::unordered_map<NodeId, Step>> first_arrival;
    for (const Event& e : events) {
        if (e.kind == EventKind::BlockMined) {
            first_arrival[e.item].emplace(e.node, e.step);
            rep.mined_by[e.node] += 1;
        } else if (e.kind == EventKind::BlockReceived) {
            auto [it, fresh] = first_arrival[e.item].emplace(e.node, e.step);
            if (!fresh && e.step < it->second) it->second = e.step;
            ++rep.blocks_received;
        } else if (e.kind == EventKind::InvSent) {
            ++rep.invs_sent;
        } else if (e.kind == EventKind::GetDataSent) {
            ++rep.getdatas_sent;
        } else if (e.kind == EventKind::TipChanged) {
            ++rep.tip_changes;
        }
    }
    rep.events_total = events.size();

    std::unordered_map<ItemId, std::vector<Step>> arrivals;
    for (auto& [id, per_node] : first_arrival) {
        auto& v = arrivals[id];
        v.reserve(per_node.size());
        for (auto& [node, step] : per_node) v.push_back(step);
        std::sort(v.begin(), v.end());
    }

    const auto chain = main_chain(events);
    rep.blocks_total = table.size() - 1; // genesis is not mined
    rep.blocks_main = chain.size() - 1;
    rep.main_chain_height = chain.back().height;
    rep.stale_rate_percent =
        100.0 * static_cast<double>(rep.blocks_total - rep.blocks_main) /
        static_cast<double>(rep.blocks_total);

    for (std::size_t i = 1; i < chain.size(); ++i) {
        rep.total_tx_main += chain[i].tx_count;
        rep.main_by[chain[i].miner] += 1;
    }

    // mean gap between consecutive mined main-chain blocks; the genesis gap is
    // not a mining interval and stays out
    if (chain.size() >= 3) {
        const double span =
            static_cast<double>(chain.back().created - chain[1].created);
        rep.avg_block_interval_minutes =
            span / static_cast<double>(chain.size() - 2) *
            meta.seconds_per_step / 60.0;
    }

    const double duration_seconds =
        static_cast<double>(meta.total_steps) * meta.seconds_per_step;
    rep.tps = static_cast<double>(rep.total_tx_main) / duration_seconds;

    const auto d50 = detail::reach_time(table, arrivals, meta.node_count, 50);
    const auto d90 = detail::reach_time(table, arrivals, meta.node_count, 90);
    rep.d50_seconds = d50.mean_steps * meta.seconds_per_step;
    rep.d90_seconds = d90.mean_steps * meta.seconds_per_step;
    rep.d50_median_seconds = d50.median_steps * meta.seconds_per_step;
    rep.d90_median_seconds = d90.median_steps * meta.seconds_per_step;
    rep.d50_blocks_measured = d50.measured;
    rep.d50_blocks_unreached = d50.unreached;
    rep.d90_blocks_measured = d90.measured;
    rep.d90_blocks_unreached = d90.unreached;

    return rep;
}

} // namespace chainsim::metrics
