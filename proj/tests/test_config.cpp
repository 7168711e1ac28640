#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include <json.hpp>

#include "chainsim/config.hpp"

using namespace chainsim;
using Catch::Matchers::ContainsSubstring;
using nlohmann::json;

namespace {

const std::string kConfigs = CHAINSIM_CONFIGS_DIR;
const std::string kData = CHAINSIM_DATA_DIR;

// smallest valid document; regions_file is absolute so base_dir is moot
json base_doc() {
    return json{
        {"total_steps", 1000},
        {"seconds_per_step", 1.0},
        {"regions_file", kData + "/two_regions.csv"},
        {"topology", {{"kind", "full_mesh"}}},
    };
}

SimConfig load(const json& doc) { return load_config_json(doc, "."); }

} // namespace

TEST_CASE("the shipped configs all load") {
    for (const char* name :
         {"baseline_small", "two_miners", "selfish_alpha04", "ring_predicate",
          "exp1", "exp2", "exp3", "exp4", "exp5", "exp6"}) {
        INFO(name);
        CHECK_NOTHROW(load_config(kConfigs + "/" + name + ".json"));
    }
}

TEST_CASE("a loaded config carries everything derived") {
    auto cfg = load_config(kConfigs + "/baseline_small.json");
    CHECK(cfg.master_seed == 3);
    CHECK(cfg.total_steps == 3000000);
    CHECK(cfg.seconds_per_step == 0.1);
    CHECK(cfg.dataset.regions.size() == 9);
    CHECK(cfg.nodes_per_region == 1);
    CHECK(cfg.node_count() == 9);
    CHECK(cfg.topology.kind == net::TopologyKind::uniform_random_k);
    CHECK(cfg.topology.k == 2);
    CHECK(cfg.block_interval_steps() == 6000); // 600 s at 0.1 s per step
    CHECK_FALSE(cfg.attacker.enabled);
    CHECK(cfg.output.dir == "out/baseline_small");

    auto duel = load_config(kConfigs + "/two_miners.json");
    CHECK(duel.block_interval_steps() == 100);
    CHECK(duel.node_count() == 2); // node counts come from the dataset
    CHECK(duel.honest_node_count() == 2);

    auto attack = load_config(kConfigs + "/selfish_alpha04.json");
    CHECK(attack.attacker.enabled);
    CHECK(attack.attacker.alpha_share == 0.4);
    CHECK(attack.node_count() == 10);
}

TEST_CASE("every config failure names the key") {
    SECTION("root must be an object") {
        CHECK_THROWS_WITH(load(json::array()),
                          ContainsSubstring("root must be an object"));
    }
    SECTION("unknown keys, root and nested") {
        auto doc = base_doc();
        doc["total_stepz"] = 5;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'total_stepz'"));

        doc = base_doc();
        doc["topology"]["kindd"] = "x";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'topology.kindd'"));

        doc = base_doc();
        doc["protocol"] = {{"interval", 1}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'protocol.interval'"));

        doc = base_doc();
        doc["attacker"] = {{"alpha", 0.3}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'attacker.alpha'"));

        doc = base_doc();
        doc["output"] = {{"path", "x"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'output.path'"));
    }
    SECTION("missing and malformed scalars") {
        auto doc = base_doc();
        doc.erase("total_steps");
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'total_steps'"));

        doc = base_doc();
        doc["total_steps"] = 0;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("must be >= 1"));

        doc = base_doc();
        doc["total_steps"] = 10.5;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("non-negative integer"));

        doc = base_doc();
        doc["master_seed"] = -3;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'master_seed'"));

        doc = base_doc();
        doc.erase("seconds_per_step");
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'seconds_per_step'"));

        doc = base_doc();
        doc["seconds_per_step"] = 0.0;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("must be positive"));

        doc = base_doc();
        doc["seconds_per_step"] = "fast";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("expected a number"));

        doc = base_doc();
        doc.erase("regions_file");
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'regions_file'"));

        doc = base_doc();
        doc["regions_file"] = kData + "/absent.csv";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("cannot open"));

        doc = base_doc();
        doc.erase("topology");
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'topology'"));
    }
    SECTION("nodes_per_region") {
        auto doc = base_doc();
        doc["nodes_per_region"] = 0;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("or \"full\""));

        doc["nodes_per_region"] = "fulll";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'nodes_per_region'"));

        doc["nodes_per_region"] = "full";
        CHECK(load(doc).node_count() == 2);

        doc["nodes_per_region"] = 3;
        CHECK(load(doc).node_count() == 6);
    }
    SECTION("topology specs") {
        auto doc = base_doc();
        doc["topology"] = {{"kind", "smallworld"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("unknown kind"));

        doc["topology"] = {{"kind", "uniform_random_k"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'topology.k'"));

        doc["topology"] = {{"kind", "uniform_random_k"}, {"k", 5}};
        CHECK_THROWS_WITH(load(doc),
                          ContainsSubstring("smaller than the node count (2)"));

        doc["topology"] = {{"kind", "explicit_edges"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'topology.edges'"));

        doc["topology"] = {{"kind", "explicit_edges"},
                           {"edges", json::array({json::array({0, 1, 2})})}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("two-element array"));

        doc["topology"] = {{"kind", "explicit_edges"},
                           {"edges", json::array({json::array({0, 7})})}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("only 2 nodes"));

        doc["topology"] = {{"kind", "predicate_expression"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'topology.expression'"));

        doc["topology"] = {{"kind", "predicate_expression"},
                           {"expression", "n1.id =="}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("offset"));
    }
    SECTION("protocol") {
        auto doc = base_doc();
        doc["protocol"] = {{"block_interval_seconds", 0}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("must be positive"));

        // rounds to zero steps at one second per step
        doc["protocol"] = {{"block_interval_seconds", 0.4}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("shorter than one step"));

        doc["protocol"] = {{"tx_count_std", -1.0}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'protocol.tx_count_std'"));
    }
    SECTION("attacker") {
        auto doc = base_doc();
        doc["attacker"] = {{"enabled", true}, {"alpha_share", 0.0},
                           {"region", "Alpha"}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("in (0, 1)"));

        doc["attacker"]["alpha_share"] = 1.0;
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("in (0, 1)"));

        doc["attacker"]["alpha_share"] = 0.4;
        doc["attacker"]["region"] = "Atlantis";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("not in the regions file"));

        doc["attacker"]["region"] = "Alpha";
        auto cfg = load(doc);
        CHECK(cfg.node_count() == 3);

        // disabled attacker blocks nothing, whatever the other fields say
        doc["attacker"]["enabled"] = false;
        doc["attacker"]["region"] = "Atlantis";
        CHECK_NOTHROW(load(doc));

        doc["attacker"]["enabled"] = "yes";
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("expected a boolean"));
    }
    SECTION("output") {
        auto doc = base_doc();
        doc["output"] = {{"event_log", 1}};
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("expected a boolean"));
    }
}

TEST_CASE("overrides patch the document before validation") {
    auto doc = base_doc();

    apply_override(doc, "total_steps=5000");
    CHECK(doc["total_steps"] == json(5000));

    apply_override(doc, "topology.kind=ring");
    CHECK(doc["topology"]["kind"] == json("ring")); // bare word stays a string

    apply_override(doc, "attacker.alpha_share=0.3");
    CHECK(doc["attacker"]["alpha_share"] == json(0.3));
    apply_override(doc, "attacker.enabled=true");
    CHECK(doc["attacker"]["enabled"] == json(true));
    apply_override(doc, "attacker.region=Alpha");

    auto cfg = load(doc);
    CHECK(cfg.total_steps == 5000);
    CHECK(cfg.topology.kind == net::TopologyKind::ring);
    CHECK(cfg.attacker.alpha_share == 0.3);

    SECTION("bad forms throw") {
        CHECK_THROWS_WITH(apply_override(doc, "noequals"),
                          ContainsSubstring("key=value"));
        CHECK_THROWS_WITH(apply_override(doc, "=5"),
                          ContainsSubstring("key=value"));
        CHECK_THROWS_WITH(apply_override(doc, "a..b=1"),
                          ContainsSubstring("empty key segment"));
    }

    SECTION("an override introducing an unknown key still fails validation") {
        apply_override(doc, "bogus=1");
        CHECK_THROWS_WITH(load(doc), ContainsSubstring("'bogus'"));
    }
}

TEST_CASE("sweep ranges are inclusive and validated") {
    auto v = parse_sweep_range("0.1:0.45:0.05");
    REQUIRE(v.size() == 8);
    CHECK(v.front() == 0.1);
    CHECK(v.back() == Catch::Approx(0.45).margin(1e-12));

    auto w = parse_sweep_range("1:3:1");
    REQUIRE(w == std::vector<double>{1.0, 2.0, 3.0});

    CHECK(parse_sweep_range("2:2:1") == std::vector<double>{2.0});

    CHECK_THROWS_WITH(parse_sweep_range("1:0:1"),
                      ContainsSubstring("below start"));
    CHECK_THROWS_WITH(parse_sweep_range("1:2:0"),
                      ContainsSubstring("step must be positive"));
    CHECK_THROWS_WITH(parse_sweep_range("1:2"),
                      ContainsSubstring("start:stop:step"));
    CHECK_THROWS_WITH(parse_sweep_range("a:2:1"),
                      ContainsSubstring("bad number 'a'"));
    CHECK_THROWS_WITH(parse_sweep_range("1:2:0.5x"),
                      ContainsSubstring("bad number '0.5x'"));
}
