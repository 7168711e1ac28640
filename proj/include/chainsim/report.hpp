#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "chainsim/metrics.hpp"
#include "chainsim/runner.hpp"

namespace chainsim {

// %.10g keeps CSV readable while preserving more digits than any of the
// measured quantities carry
inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline nlohmann::ordered_json report_to_json(const metrics::RunMeta& meta,
                                             const metrics::MetricsReport& r) {
    nlohmann::ordered_json j;
    j["meta"] = {{"total_steps", meta.total_steps},
                 {"seconds_per_step", meta.seconds_per_step},
                 {"node_count", meta.node_count},
                 {"topology_connected", meta.topology_connected},
                 {"topology_components", meta.topology_components}};
    j["blocks"] = {{"total", r.blocks_total},
                   {"main_chain", r.blocks_main},
                   {"main_chain_height", r.main_chain_height},
                   {"stale_rate_percent", r.stale_rate_percent}};
    j["avg_block_interval_minutes"] = r.avg_block_interval_minutes;
    j["tps"] = r.tps;
    j["total_tx_main"] = r.total_tx_main;
    j["propagation"] = {{"d50_mean_seconds", r.d50_seconds},
                        {"d50_median_seconds", r.d50_median_seconds},
                        {"d50_blocks_measured", r.d50_blocks_measured},
                        {"d50_blocks_unreached", r.d50_blocks_unreached},
                        {"d90_mean_seconds", r.d90_seconds},
                        {"d90_median_seconds", r.d90_median_seconds},
                        {"d90_blocks_measured", r.d90_blocks_measured},
                        {"d90_blocks_unreached", r.d90_blocks_unreached}};
    j["events"] = {{"total", r.events_total},
                   {"invs_sent", r.invs_sent},
                   {"getdatas_sent", r.getdatas_sent},
                   {"blocks_received", r.blocks_received},
                   {"tip_changes", r.tip_changes}};
    nlohmann::ordered_json mined = nlohmann::ordered_json::object();
    nlohmann::ordered_json main = nlohmann::ordered_json::object();
    for (const auto& [node, n] : r.mined_by) mined[std::to_string(node)] = n;
    for (const auto& [node, n] : r.main_by) main[std::to_string(node)] = n;
    j["mined_by"] = std::move(mined);
    j["main_by"] = std::move(main);
    return j;
}

inline std::string summary_csv_header() {
    return "master_seed,total_steps,seconds_per_step,nodes,blocks_total,"
           "blocks_main,stale_rate_percent,avg_block_interval_minutes,tps,"
           "d50_mean_s,d50_median_s,d90_mean_s,d90_median_s,"
           "attacker_alpha,attacker_revenue_share,attacker_gamma\n";
}

inline std::string summary_csv_row(const SimConfig& cfg, const RunResult& res) {
    const auto& r = res.report;
    std::string row;
    row += std::to_string(cfg.master_seed) + ',';
    row += std::to_string(cfg.total_steps) + ',';
    row += fmt_g(cfg.seconds_per_step) + ',';
    row += std::to_string(res.meta.node_count) + ',';
    row += std::to_string(r.blocks_total) + ',';
    row += std::to_string(r.blocks_main) + ',';
    row += fmt_g(r.stale_rate_percent) + ',';
    row += fmt_g(r.avg_block_interval_minutes) + ',';
    row += fmt_g(r.tps) + ',';
    row += fmt_g(r.d50_seconds) + ',';
    row += fmt_g(r.d50_median_seconds) + ',';
    row += fmt_g(r.d90_seconds) + ',';
    row += fmt_g(r.d90_median_seconds) + ',';
    if (res.attacker) {
        row += fmt_g(res.attacker->alpha) + ',';
        row += fmt_g(res.attacker->revenue_share) + ',';
        row += fmt_g(res.attacker->stats.gamma());
    } else {
        row += ",,";
    }
    row += '\n';
    return row;
}

} // namespace chainsim
