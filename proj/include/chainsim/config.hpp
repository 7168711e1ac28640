#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainsim/bitcoin_node.hpp"
#include "chainsim/errors.hpp"
#include "chainsim/regions.hpp"
#include "chainsim/topology.hpp"

namespace chainsim {

struct AttackerConfig {
    bool enabled = false;
    double alpha_share = 0.0; // attacker's share of total mining power
    std::string region;
};

struct OutputConfig {
    std::string dir = "out";
    bool event_log = true;
};

// A fully validated run description. The regions dataset referenced by the
// file is loaded eagerly, so a SimConfig in hand means every region lookup,
// node count and probability derived from it will succeed.
struct SimConfig {
    std::uint64_t master_seed = 1;
    Step total_steps = 0;
    double seconds_per_step = 1.0;
    std::string regions_file;
    std::uint32_t nodes_per_region = 0; // 0 = use each region's own node_count
    net::TopologySpec topology;
    btc::ProtocolParams protocol;
    double block_interval_seconds = 600.0;
    AttackerConfig attacker;
    OutputConfig output;

    net::RegionDataset dataset;

    Step block_interval_steps() const {
        return static_cast<Step>(
            std::llround(block_interval_seconds / seconds_per_step));
    }

    std::uint32_t region_node_count(std::size_t region_idx) const {
        return nodes_per_region ? nodes_per_region
                                : dataset.regions.at(region_idx).node_count;
    }

    std::uint32_t honest_node_count() const {
        std::uint32_t n = 0;
        for (std::size_t i = 0; i < dataset.regions.size(); ++i)
            n += region_node_count(i);
        return n;
    }

    std::uint32_t node_count() const {
        return honest_node_count() + (attacker.enabled ? 1 : 0);
    }
};

namespace cfgdetail {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok)
            throw ConfigError("unknown config key '" +
                              (where.empty() ? it.key() : where + "." + it.key()) +
                              "'");
    }
}

inline double num(const json& j, const std::string& key) {
    if (!j.is_number()) bad(key, "expected a number");
    return j.get<double>();
}

// integers may arrive as JSON doubles (sweeps and overrides produce them)
inline std::uint64_t uint(const json& j, const std::string& key) {
    const double v = num(j, key);
    if (v < 0 || v != std::floor(v)) bad(key, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

inline std::string str(const json& j, const std::string& key) {
    if (!j.is_string()) bad(key, "expected a string");
    return j.get<std::string>();
}

inline net::TopologySpec parse_topology(const json& j) {
    if (!j.is_object()) bad("topology", "expected an object");
    check_keys(j, "topology", {"kind", "expression", "edges", "k"});
    if (!j.contains("kind")) bad("topology.kind", "missing");
    const std::string kind = str(j.at("kind"), "topology.kind");

    net::TopologySpec spec;
    if (kind == "predicate_expression") {
        spec.kind = net::TopologyKind::predicate_expression;
        if (!j.contains("expression")) bad("topology.expression", "missing");
        spec.expression = str(j.at("expression"), "topology.expression");
        try {
            net::parse_topology_expr(spec.expression);
        } catch (const ParseError& e) {
            bad("topology.expression",
                std::string(e.what()) + " at offset " + std::to_string(e.position));
        }
    } else if (kind == "explicit_edges") {
        spec.kind = net::TopologyKind::explicit_edges;
        if (!j.contains("edges")) bad("topology.edges", "missing");
        const json& edges = j.at("edges");
        if (!edges.is_array()) bad("topology.edges", "expected an array of pairs");
        for (const json& e : edges) {
            if (!e.is_array() || e.size() != 2)
                bad("topology.edges", "each edge must be a two-element array");
            spec.edges.emplace_back(
                static_cast<NodeId>(uint(e[0], "topology.edges")),
                static_cast<NodeId>(uint(e[1], "topology.edges")));
        }
    } else if (kind == "uniform_random_k") {
        spec.kind = net::TopologyKind::uniform_random_k;
        if (!j.contains("k")) bad("topology.k", "missing");
        spec.k = static_cast<std::uint32_t>(uint(j.at("k"), "topology.k"));
    } else if (kind == "ring") {
        spec.kind = net::TopologyKind::ring;
    } else if (kind == "full_mesh") {
        spec.kind = net::TopologyKind::full_mesh;
    } else {
        bad("topology.kind",
            "unknown kind '" + kind +
                "' (predicate_expression, explicit_edges, uniform_random_k, "
                "ring, full_mesh)");
    }
    return spec;
}

} // namespace cfgdetail

// Parse and validate a config document. `base_dir` anchors the regions_file
// path. Every failure names the key it is about.
inline SimConfig load_config_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir) {
    using namespace cfgdetail;
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    check_keys(doc, "",
               {"master_seed", "total_steps", "seconds_per_step", "regions_file",
                "nodes_per_region", "topology", "protocol", "attacker", "output"});

    SimConfig c;
    if (doc.contains("master_seed"))
        c.master_seed = uint(doc.at("master_seed"), "master_seed");

    if (!doc.contains("total_steps")) bad("total_steps", "missing");
    c.total_steps = uint(doc.at("total_steps"), "total_steps");
    if (c.total_steps == 0) bad("total_steps", "must be >= 1");

    if (!doc.contains("seconds_per_step")) bad("seconds_per_step", "missing");
    c.seconds_per_step = num(doc.at("seconds_per_step"), "seconds_per_step");
    if (!(c.seconds_per_step > 0)) bad("seconds_per_step", "must be positive");

    if (!doc.contains("regions_file")) bad("regions_file", "missing");
    c.regions_file = str(doc.at("regions_file"), "regions_file");
    const std::filesystem::path rp = std::filesystem::path(c.regions_file).is_absolute()
            ? std::filesystem::path(c.regions_file)
            : base_dir / c.regions_file;
    c.dataset = net::load_regions_file(rp.string());

    if (doc.contains("nodes_per_region")) {
        const json& npr = doc.at("nodes_per_region");
        if (npr.is_string()) {
            if (npr.get<std::string>() != "full")
                bad("nodes_per_region", "expected a positive integer or \"full\"");
            c.nodes_per_region = 0;
        } else {
            c.nodes_per_region =
                static_cast<std::uint32_t>(uint(npr, "nodes_per_region"));
            if (c.nodes_per_region == 0)
                bad("nodes_per_region", "must be >= 1 (or \"full\")");
        }
    }

    if (!doc.contains("topology")) bad("topology", "missing");
    c.topology = parse_topology(doc.at("topology"));

    if (doc.contains("protocol")) {
        const json& p = doc.at("protocol");
        if (!p.is_object()) bad("protocol", "expected an object");
        check_keys(p, "protocol",
                   {"block_interval_seconds", "header_bytes", "inv_bytes",
                    "getdata_bytes", "tx_count_mean", "tx_count_std",
                    "tx_size_mean", "tx_size_std"});
        auto get = [&](const char* k, double& out) {
            if (p.contains(k)) out = num(p.at(k), std::string("protocol.") + k);
        };
        get("block_interval_seconds", c.block_interval_seconds);
        get("tx_count_mean", c.protocol.tx.count_mean);
        get("tx_count_std", c.protocol.tx.count_std);
        get("tx_size_mean", c.protocol.tx.size_mean);
        get("tx_size_std", c.protocol.tx.size_std);
        auto get_u32 = [&](const char* k, std::uint32_t& out) {
            if (p.contains(k))
                out = static_cast<std::uint32_t>(
                    uint(p.at(k), std::string("protocol.") + k));
        };
        get_u32("header_bytes", c.protocol.header_bytes);
        get_u32("inv_bytes", c.protocol.inv_bytes);
        get_u32("getdata_bytes", c.protocol.getdata_bytes);
        if (c.block_interval_seconds <= 0)
            bad("protocol.block_interval_seconds", "must be positive");
        if (c.protocol.tx.count_std < 0) bad("protocol.tx_count_std", "must be >= 0");
        if (c.protocol.tx.size_std < 0) bad("protocol.tx_size_std", "must be >= 0");
    }

    if (doc.contains("attacker")) {
        const json& a = doc.at("attacker");
        if (!a.is_object()) bad("attacker", "expected an object");
        check_keys(a, "attacker", {"enabled", "alpha_share", "region"});
        if (a.contains("enabled")) {
            if (!a.at("enabled").is_boolean()) bad("attacker.enabled", "expected a boolean");
            c.attacker.enabled = a.at("enabled").get<bool>();
        }
        if (a.contains("alpha_share"))
            c.attacker.alpha_share = num(a.at("alpha_share"), "attacker.alpha_share");
        if (a.contains("region"))
            c.attacker.region = str(a.at("region"), "attacker.region");
        if (c.attacker.enabled) {
            if (!(c.attacker.alpha_share > 0) || c.attacker.alpha_share >= 1)
                bad("attacker.alpha_share", "must be in (0, 1)");
            if (!c.dataset.regions.contains(c.attacker.region))
                bad("attacker.region",
                    "'" + c.attacker.region + "' is not in the regions file");
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object()) bad("output", "expected an object");
        check_keys(o, "output", {"dir", "event_log"});
        if (o.contains("dir")) c.output.dir = str(o.at("dir"), "output.dir");
        if (o.contains("event_log")) {
            if (!o.at("event_log").is_boolean())
                bad("output.event_log", "expected a boolean");
            c.output.event_log = o.at("event_log").get<bool>();
        }
    }

    // cross-field checks
    if (c.block_interval_steps() < 1)
        bad("protocol.block_interval_seconds",
            "shorter than one step at this seconds_per_step");
    const std::uint32_t n = c.node_count();
    if (n == 0) bad("nodes_per_region", "configuration yields zero nodes");
    if (c.topology.kind == net::TopologyKind::uniform_random_k && c.topology.k >= n)
        bad("topology.k", "must be smaller than the node count (" +
                              std::to_string(n) + ")");
    if (c.topology.kind == net::TopologyKind::explicit_edges)
        for (auto [a, b] : c.topology.edges)
            if (a >= n || b >= n)
                bad("topology.edges", "edge references node " +
                                          std::to_string(a >= n ? a : b) +
                                          " but there are only " +
                                          std::to_string(n) + " nodes");
    return c;
}

inline SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    return load_config_json(doc, path.parent_path());
}

// "a.b.c=value" applied onto the raw document, before validation, so a bad
// override fails exactly like a bad file value. Values parse as JSON when
// they can (numbers, booleans) and fall back to strings.
inline void apply_override(nlohmann::json& doc, const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + keyval + "' must look like key=value");
    const std::string path = keyval.substr(0, eq);
    const std::string raw = keyval.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    nlohmann::json* cur = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (part.empty())
            throw ConfigError("override '" + keyval + "' has an empty key segment");
        if (dot == std::string::npos) {
            (*cur)[part] = std::move(value);
            return;
        }
        cur = &(*cur)[part];
        start = dot + 1;
    }
}

// "start:stop:step", endpoint included (with tolerance for binary fractions)
inline std::vector<double> parse_sweep_range(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("sweep range '" + spec + "' must be start:stop:step");
    auto parse = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("sweep range '" + spec + "': bad number '" + s + "'");
        }
    };
    const double start = parse(spec.substr(0, c1));
    const double stop = parse(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse(spec.substr(c2 + 1));
    if (!(step > 0))
        throw ConfigError("sweep range '" + spec + "': step must be positive");
    if (stop < start)
        throw ConfigError("sweep range '" + spec + "': stop is below start");
    std::vector<double> values;
    for (std::size_t i = 0;; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v > stop + step * 1e-9) break;
        values.push_back(v);
    }
    return values;
}

} // namespace chainsim
