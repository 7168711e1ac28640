#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "chainsim/bitcoin_node.hpp"
#include "chainsim/config.hpp"
#include "chainsim/delay.hpp"
#include "chainsim/engine.hpp"
#include "chainsim/metrics.hpp"
#include "chainsim/selfish_node.hpp"

namespace chainsim {

// where every node lives and how much power it has; ids are assigned region by
// region in file order, the attacker (if any) takes the last id
struct NodePlan {
    std::vector<std::size_t> region_of;
    std::vector<double> power;
    NodeId attacker_id = kNoNode;
};

inline NodePlan plan_nodes(const SimConfig& cfg) {
    NodePlan plan;
    double share_sum = 0;
    for (const auto& r : cfg.dataset.regions) share_sum += r.mine_power_share;

    // Honest regional shares stand as given (a sum below 1 models miners
    // outside the simulated universe). With an attacker holding alpha of the
    // total, honest shares are rescaled to sum to 1 - alpha.
    double honest_scale = 1.0;
    if (cfg.attacker.enabled && share_sum > 0)
        honest_scale = (1.0 - cfg.attacker.alpha_share) / share_sum;

    for (std::size_t r = 0; r < cfg.dataset.regions.size(); ++r) {
        const std::uint32_t count = cfg.region_node_count(r);
        const double share = cfg.dataset.regions.at(r).mine_power_share;
        for (std::uint32_t i = 0; i < count; ++i) {
            plan.region_of.push_back(r);
            plan.power.push_back(count ? share * honest_scale / count : 0.0);
        }
    }
    if (cfg.attacker.enabled) {
        plan.attacker_id = static_cast<NodeId>(plan.region_of.size());
        plan.region_of.push_back(cfg.dataset.regions.index_of(cfg.attacker.region));
        plan.power.push_back(cfg.attacker.alpha_share);
    }
    return plan;
}

struct AttackerSummary {
    double alpha = 0;
    NodeId node = kNoNode;
    std::uint64_t blocks_mined = 0;
    std::uint64_t blocks_on_main_chain = 0;
    double revenue_share = 0; // fraction of main-chain blocks that are the attacker's
    btc::AttackerStats stats;
};

struct RunResult {
    EventLog events;
    metrics::RunMeta meta;
    metrics::MetricsReport report;
    engine::Simulation<btc::Message>::Totals totals;
    net::Connectivity connectivity;
    std::optional<AttackerSummary> attacker;
};

// Build the world a config describes and run it to completion. The iteration
// order parameter exists to demonstrate schedule independence; it must never
// change the outcome.
inline RunResult run_simulation(
    const SimConfig& cfg,
    engine::IterationOrder order = engine::IterationOrder::ascending) {
    const NodePlan plan = plan_nodes(cfg);
    const std::size_t n = plan.region_of.size();

    std::vector<net::NodeDescriptor> descriptors;
    descriptors.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        descriptors.push_back(net::NodeDescriptor{
            static_cast<std::int64_t>(i),
            cfg.dataset.regions.at(plan.region_of[i]).id});

    RngStream topo_rng = RngStream::derive(cfg.master_seed, kNoNode, "topology");
    net::Graph graph = net::build_topology(descriptors, cfg.topology, topo_rng);
    const net::Connectivity conn = net::check_connectivity(graph);

    // per-node lookups the delay callback needs, captured by value
    std::vector<double> up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = cfg.dataset.regions.at(plan.region_of[i]);
        up[i] = r.upload_mbps;
        down[i] = r.download_mbps;
    }
    const auto region_of = plan.region_of;
    const auto latency = cfg.dataset.latency;
    const double sps = cfg.seconds_per_step;
    auto delay = [up, down, region_of, latency, sps](
                     NodeId from, NodeId to, std::uint64_t bytes) -> Step {
        const double seconds =
            net::delay_seconds(latency.ms(region_of[from], region_of[to]), bytes,
                               up[from], down[to]);
        return net::delay_to_steps(seconds, sps);
    };

    engine::Simulation<btc::Message>::Params params;
    params.total_steps = cfg.total_steps;
    params.seconds_per_step = cfg.seconds_per_step;
    params.order = order;
    engine::Simulation<btc::Message> sim(params, graph.adj, delay);

    const Step interval = cfg.block_interval_steps();
    const btc::SelfishMiner* attacker_node = nullptr;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId id = static_cast<NodeId>(i);
        const btc::MinerParams mp{plan.power[i], 1.0, interval};
        if (cfg.attacker.enabled && id == plan.attacker_id) {
            auto node = std::make_unique<btc::SelfishMiner>(id, cfg.master_seed,
                                                            mp, cfg.protocol);
            attacker_node = node.get();
            sim.add_node(std::move(node));
        } else {
            sim.add_node(std::make_unique<btc::BitcoinNode>(id, cfg.master_seed,
                                                            mp, cfg.protocol));
        }
    }

    RunResult out;
    out.connectivity = conn;
    out.totals = sim.run(out.events);
    out.meta = metrics::RunMeta{cfg.total_steps, cfg.seconds_per_step,
                                static_cast<std::uint32_t>(n), conn.connected,
                                static_cast<std::uint32_t>(conn.components)};
    out.report = metrics::compute_metrics(out.events, out.meta);

    if (attacker_node) {
        AttackerSummary a;
        a.alpha = cfg.attacker.alpha_share;
        a.node = plan.attacker_id;
        a.blocks_mined = attacker_node->blocks_mined();
        a.stats = attacker_node->stats();
        auto it = out.report.main_by.find(plan.attacker_id);
        a.blocks_on_main_chain = it == out.report.main_by.end() ? 0 : it->second;
        if (out.report.blocks_main > 0)
            a.revenue_share = static_cast<double>(a.blocks_on_main_chain) /
                              static_cast<double>(out.report.blocks_main);
        out.attacker = a;
    }
    return out;
}

} // namespace chainsim
