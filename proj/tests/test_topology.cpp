#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "chainsim/rng.hpp"
#include "chainsim/topology.hpp"

using namespace chainsim;
using namespace chainsim::net;

static std::vector<NodeDescriptor> make_nodes(std::size_t n) {
    std::vector<NodeDescriptor> nodes;
    for (std::size_t i = 0; i < n; ++i)
        nodes.push_back({static_cast<std::int64_t>(i), "R" + std::to_string(i % 3)});
    return nodes;
}

static RngStream topo_rng(std::uint64_t seed = 1) {
    return RngStream::derive(seed, kNoNode, "topology");
}

TEST_CASE("built-in ring") {
    auto rng = topo_rng();
    SECTION("ten nodes form a cycle") {
        auto g = build_topology(make_nodes(10), {TopologyKind::ring}, rng);
        REQUIRE(g.node_count() == 10);
        CHECK(g.edge_count() == 10);
        for (NodeId i = 0; i < 10; ++i) CHECK(g.adj[i].size() == 2);
        CHECK(g.has_edge(0, 9));
        CHECK(g.has_edge(3, 4));
        CHECK_FALSE(g.has_edge(0, 5));
        CHECK(check_connectivity(g).connected);
    }
    SECTION("two nodes share a single edge") {
        auto g = build_topology(make_nodes(2), {TopologyKind::ring}, rng);
        CHECK(g.edge_count() == 1);
    }
    SECTION("one node has no edges") {
        auto g = build_topology(make_nodes(1), {TopologyKind::ring}, rng);
        CHECK(g.edge_count() == 0);
        CHECK(check_connectivity(g).connected);
    }
}

TEST_CASE("full mesh connects every pair once") {
    auto rng = topo_rng();
    auto g = build_topology(make_nodes(5), {TopologyKind::full_mesh}, rng);
    CHECK(g.edge_count() == 10);
    for (NodeId i = 0; i < 5; ++i) CHECK(g.adj[i].size() == 4);
}

TEST_CASE("explicit edges are deduplicated and self-loops dropped") {
    TopologySpec spec;
    spec.kind = TopologyKind::explicit_edges;
    spec.edges = {{0, 1}, {1, 0}, {2, 2}, {1, 2}, {0, 1}};
    auto rng = topo_rng();
    auto g = build_topology(make_nodes(3), spec, rng);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(2, 2));

    spec.edges = {{0, 7}};
    REQUIRE_THROWS_AS(build_topology(make_nodes(3), spec, rng), InvalidSpec);
}

TEST_CASE("uniform random k") {
    TopologySpec spec;
    spec.kind = TopologyKind::uniform_random_k;
    spec.k = 3;

    SECTION("every node ends up with at least k distinct neighbours") {
        auto rng = topo_rng(77);
        auto g = build_topology(make_nodes(12), spec, rng);
        for (NodeId i = 0; i < 12; ++i) {
            CHECK(g.adj[i].size() >= 3);
            // simple graph: sorted adjacency, no self, no repeats
            for (std::size_t j = 0; j < g.adj[i].size(); ++j) {
                CHECK(g.adj[i][j] != i);
                if (j) CHECK(g.adj[i][j] > g.adj[i][j - 1]);
            }
        }
    }

    SECTION("same stream, same graph") {
        auto r1 = topo_rng(77);
        auto r2 = topo_rng(77);
        auto g1 = build_topology(make_nodes(12), spec, r1);
        auto g2 = build_topology(make_nodes(12), spec, r2);
        REQUIRE(g1.adj == g2.adj);
        auto r3 = topo_rng(78);
        auto g3 = build_topology(make_nodes(12), spec, r3);
        CHECK(g1.adj != g3.adj);
    }

    SECTION("k must leave room for distinct partners") {
        auto rng = topo_rng();
        spec.k = 12;
        REQUIRE_THROWS_AS(build_topology(make_nodes(12), spec, rng), InvalidSpec);
        spec.k = 13;
        REQUIRE_THROWS_AS(build_topology(make_nodes(12), spec, rng), InvalidSpec);
    }
}

TEST_CASE("predicate ring matches the built-in ring") {
    TopologySpec spec;
    spec.kind = TopologyKind::predicate_expression;
    spec.expression = "abs(n1.id - n2.id) == 1 or abs(n1.id - n2.id) == 9";
    auto rng = topo_rng();
    auto g = build_topology(make_nodes(10), spec, rng);

    // a connected 2-regular graph on 10 vertices is the 10-cycle
    REQUIRE(g.node_count() == 10);
    CHECK(g.edge_count() == 10);
    for (NodeId i = 0; i < 10; ++i) CHECK(g.adj[i].size() == 2);
    auto conn = check_connectivity(g);
    CHECK(conn.connected);
    CHECK(conn.components == 1);

    auto rng2 = topo_rng();
    auto ring = build_topology(make_nodes(10), {TopologyKind::ring}, rng2);
    CHECK(g.adj == ring.adj); // here even the labelling coincides
}

TEST_CASE("predicate edges are symmetrized with or") {
    TopologySpec spec;
    spec.kind = TopologyKind::predicate_expression;
    spec.expression = "n1.id - n2.id == 1"; // holds in one direction only
    auto rng = topo_rng();
    auto g = build_topology(make_nodes(4), spec, rng);
    CHECK(g.edge_count() == 3);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(2, 3));
}

TEST_CASE("predicate over regions builds regional cliques") {
    TopologySpec spec;
    spec.kind = TopologyKind::predicate_expression;
    spec.expression = "n1.region == n2.region";
    auto rng = topo_rng();
    // regions cycle R0 R1 R2, so 9 nodes give three triangles
    auto g = build_topology(make_nodes(9), spec, rng);
    CHECK(g.edge_count() == 9);
    auto conn = check_connectivity(g);
    CHECK_FALSE(conn.connected);
    CHECK(conn.components == 3);
}

TEST_CASE("connectivity of edge cases") {
    Graph empty;
    CHECK(check_connectivity(empty).connected);
    CHECK(check_connectivity(empty).components == 0);

    Graph two_islands;
    two_islands.adj = {{1}, {0}, {3}, {2}};
    auto conn = check_connectivity(two_islands);
    CHECK_FALSE(conn.connected);
    CHECK(conn.components == 2);
}
