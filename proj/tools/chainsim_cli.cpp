#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainsim/event_log.hpp"
#include "chainsim/report.hpp"
#include "chainsim/runner.hpp"

namespace fs = std::filesystem;
using namespace chainsim;

namespace {

SimConfig load_with_overrides(const std::string& path,
                              const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return load_config_json(doc, fs::path(path).parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
}

void print_run_summary(const RunResult& res) {
    const auto& r = res.report;
    std::printf("steps            %llu (%.10g s each)\n",
                static_cast<unsigned long long>(res.meta.total_steps),
                res.meta.seconds_per_step);
    std::printf("nodes            %u%s\n", res.meta.node_count,
                res.meta.topology_connected ? ""
                                            : "  [topology NOT connected]");
    std::printf("blocks           %llu mined, %llu on main chain (height %llu)\n",
                static_cast<unsigned long long>(r.blocks_total),
                static_cast<unsigned long long>(r.blocks_main),
                static_cast<unsigned long long>(r.main_chain_height));
    std::printf("block interval   %.4g min\n", r.avg_block_interval_minutes);
    std::printf("stale rate       %.4g %%\n", r.stale_rate_percent);
    std::printf("propagation d50  %.4g s mean, %.4g s median\n", r.d50_seconds,
                r.d50_median_seconds);
    std::printf("propagation d90  %.4g s mean, %.4g s median\n", r.d90_seconds,
                r.d90_median_seconds);
    std::printf("throughput       %.6g tx/s\n", r.tps);
    if (res.attacker) {
        const auto& a = *res.attacker;
        std::printf("attacker         node %u, alpha %.4g\n", a.node, a.alpha);
        std::printf("  mined %llu, on main chain %llu, revenue share %.4g\n",
                    static_cast<unsigned long long>(a.blocks_mined),
                    static_cast<unsigned long long>(a.blocks_on_main_chain),
                    a.revenue_share);
        std::printf("  races %llu started, %llu honest-resolved, gamma %.4g\n",
                    static_cast<unsigned long long>(a.stats.races_started),
                    static_cast<unsigned long long>(
                        a.stats.races_resolved_by_honest),
                    a.stats.gamma());
    }
}

// one simulation, artifacts into out_dir: events.jsonl, metrics.json, summary.csv
RunResult run_to_dir(const SimConfig& cfg, const fs::path& out_dir,
                     bool want_events, engine::IterationOrder order) {
    RunResult res = run_simulation(cfg, order);
    fs::create_directories(out_dir);
    if (want_events) {
        std::ofstream ev(out_dir / "events.jsonl", std::ios::binary);
        if (!ev) throw Error("cannot write '" + (out_dir / "events.jsonl").string() + "'");
        write_jsonl(res.events, ev);
    }
    write_text(out_dir / "metrics.json",
               report_to_json(res.meta, res.report).dump(2) + "\n");
    write_text(out_dir / "summary.csv",
               summary_csv_header() + summary_csv_row(cfg, res));
    return res;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides, std::string out_dir,
            bool no_eventlog, const std::string& order_name) {
    SimConfig cfg = load_with_overrides(config_path, overrides);
    if (out_dir.empty()) out_dir = cfg.output.dir;
    const auto order = order_name == "desc" ? engine::IterationOrder::descending
                                            : engine::IterationOrder::ascending;
    const bool want_events = cfg.output.event_log && !no_eventlog;
    RunResult res = run_to_dir(cfg, out_dir, want_events, order);
    if (!res.connectivity.connected)
        std::fprintf(stderr,
                     "warning: topology has %zu components; blocks cannot cross "
                     "a partition\n",
                     res.connectivity.components);
    print_run_summary(res);
    std::printf("artifacts        %s\n", fs::path(out_dir).string().c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& overrides,
              const std::string& param, std::string out_dir, bool eventlog) {
    const auto eq = param.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--param must look like dotted.key=start:stop:step");
    const std::string key = param.substr(0, eq);
    const std::vector<double> values = parse_sweep_range(param.substr(eq + 1));

    // base document: file + explicit overrides, reparsed per point
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    nlohmann::json base;
    try {
        base = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + config_path + "': " + e.what());
    }
    for (const auto& o : overrides) apply_override(base, o);

    if (out_dir.empty()) out_dir = "sweep";
    fs::create_directories(out_dir);
    std::string merged = "point," + std::string("param_value,") + summary_csv_header();

    for (std::size_t i = 0; i < values.size(); ++i) {
        nlohmann::json doc = base;
        apply_override(doc, key + "=" + fmt_g(values[i]));
        SimConfig cfg = load_config_json(doc, fs::path(config_path).parent_path());
        cfg.master_seed += i; // distinct deterministic seed per point
        cfg.output.event_log = eventlog;

        char name[32];
        std::snprintf(name, sizeof name, "point_%02zu", i);
        const fs::path dir = fs::path(out_dir) / name;
        RunResult res = run_to_dir(cfg, dir, eventlog, engine::IterationOrder::ascending);
        merged += std::string(name) + ',' + fmt_g(values[i]) + ',' +
                  summary_csv_row(cfg, res);
        std::printf("%s  %s=%s  blocks=%llu stale=%.4g%%", name, key.c_str(),
                    fmt_g(values[i]).c_str(),
                    static_cast<unsigned long long>(res.report.blocks_total),
                    res.report.stale_rate_percent);
        if (res.attacker)
            std::printf("  revenue=%.4g gamma=%.4g", res.attacker->revenue_share,
                        res.attacker->stats.gamma());
        std::printf("\n");
    }
    write_text(fs::path(out_dir) / "sweep.csv", merged);
    std::printf("merged %zu points into %s\n", values.size(),
                (fs::path(out_dir) / "sweep.csv").string().c_str());
    return 0;
}

int cmd_validate(const std::string& config_path,
                 const std::vector<std::string>& overrides) {
    SimConfig cfg = load_with_overrides(config_path, overrides);
    const NodePlan plan = plan_nodes(cfg);

    std::vector<net::NodeDescriptor> descriptors;
    for (std::size_t i = 0; i < plan.region_of.size(); ++i)
        descriptors.push_back(net::NodeDescriptor{
            static_cast<std::int64_t>(i),
            cfg.dataset.regions.at(plan.region_of[i]).id});
    RngStream rng = RngStream::derive(cfg.master_seed, kNoNode, "topology");
    net::Graph g = net::build_topology(descriptors, cfg.topology, rng);
    const auto conn = net::check_connectivity(g);

    double power = 0;
    for (double p : plan.power) power += p;
    std::printf("config           %s\n", config_path.c_str());
    std::printf("regions          %zu (%s)\n", cfg.dataset.regions.size(),
                cfg.regions_file.c_str());
    std::printf("nodes            %zu", plan.region_of.size());
    if (cfg.attacker.enabled)
        std::printf(" (attacker: node %u in %s, alpha %.4g)", plan.attacker_id,
                    cfg.attacker.region.c_str(), cfg.attacker.alpha_share);
    std::printf("\n");
    std::printf("edges            %zu\n", g.edge_count());
    std::printf("mining power     %.10g of 1.0 simulated%s\n", power,
                power < 1.0 - 1e-9 ? " (remainder mines outside the network)"
                                   : "");
    std::printf("block interval   %llu steps (%.10g s, %.10g s/step)\n",
                static_cast<unsigned long long>(cfg.block_interval_steps()),
                cfg.block_interval_seconds, cfg.seconds_per_step);
    std::printf("total steps      %llu\n",
                static_cast<unsigned long long>(cfg.total_steps));
    if (conn.connected) {
        std::printf("topology         connected\n");
    } else {
        std::printf("topology         NOT connected (%zu components)\n",
                    conn.components);
        std::fprintf(stderr, "warning: blocks cannot cross a partition\n");
    }
    return 0;
}

int cmd_metrics(const std::string& events_path, const std::string& config_path,
                const std::vector<std::string>& overrides,
                const std::string& out_file) {
    SimConfig cfg = load_with_overrides(config_path, overrides);
    std::ifstream in(events_path);
    if (!in) throw ConfigError("cannot open event log '" + events_path + "'");
    EventLog events = read_jsonl(in);

    // rebuild the topology so the meta block matches the original run's
    const NodePlan plan = plan_nodes(cfg);
    std::vector<net::NodeDescriptor> descriptors;
    for (std::size_t i = 0; i < plan.region_of.size(); ++i)
        descriptors.push_back(net::NodeDescriptor{
            static_cast<std::int64_t>(i),
            cfg.dataset.regions.at(plan.region_of[i]).id});
    RngStream rng = RngStream::derive(cfg.master_seed, kNoNode, "topology");
    net::Graph g = net::build_topology(descriptors, cfg.topology, rng);
    const auto conn = net::check_connectivity(g);

    metrics::RunMeta meta;
    meta.total_steps = cfg.total_steps;
    meta.seconds_per_step = cfg.seconds_per_step;
    meta.node_count = static_cast<std::uint32_t>(plan.region_of.size());
    meta.topology_connected = conn.connected;
    meta.topology_components = static_cast<std::uint32_t>(conn.components);
    auto report = metrics::compute_metrics(events, meta);

    const std::string text = report_to_json(meta, report).dump(2) + "\n";
    if (out_file.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text(out_file, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic discrete-step blockchain network simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string events_path;
    std::string out_dir;
    std::string out_file;
    std::string order_name = "asc";
    std::string sweep_param;
    std::vector<std::string> overrides;
    bool no_eventlog = false;
    bool sweep_eventlog = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "simulation config (json)")
            ->required();
        cmd->add_option("--override", overrides,
                        "dotted.key=value applied to the config (repeatable)");
    };

    CLI::App* run = app.add_subcommand("run", "run one simulation");
    add_common(run);
    run->add_option("--out", out_dir,
                    "artifact directory (default: config output.dir)");
    run->add_flag("--no-eventlog", no_eventlog, "do not write events.jsonl");
    run->add_option("--order", order_name,
                    "node iteration order, asc or desc (result is identical)")
        ->check(CLI::IsMember({"asc", "desc"}));

    CLI::App* sweep =
        app.add_subcommand("sweep", "run the config across a parameter range");
    add_common(sweep);
    sweep->add_option("--param", sweep_param,
                      "dotted.key=start:stop:step (endpoint included)")
        ->required();
    sweep->add_option("--out", out_dir, "sweep directory (default: sweep)");
    sweep->add_flag("--eventlog", sweep_eventlog,
                    "also write events.jsonl per point");

    CLI::App* validate =
        app.add_subcommand("validate", "load a config and describe the world");
    add_common(validate);

    CLI::App* metrics_cmd = app.add_subcommand(
        "metrics", "recompute metrics from a persisted event log");
    metrics_cmd->add_option("events", events_path, "events.jsonl from a run")
        ->required();
    metrics_cmd->add_option("config", config_path, "config that produced it")
        ->required();
    metrics_cmd->add_option("--override", overrides,
                            "dotted.key=value applied to the config");
    metrics_cmd->add_option("--out", out_file, "write json here, not stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config_path, overrides, out_dir, no_eventlog,
                           order_name);
        if (*sweep)
            return cmd_sweep(config_path, overrides, sweep_param, out_dir,
                             sweep_eventlog);
        if (*validate) return cmd_validate(config_path, overrides);
        if (*metrics_cmd)
            return cmd_metrics(events_path, config_path, overrides, out_file);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
