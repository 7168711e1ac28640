#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainsim/errors.hpp"
#include "chainsim/ids.hpp"
#include "chainsim/predicate.hpp"
#include "chainsim/rng.hpp"

namespace chainsim::net {

enum class TopologyKind {
    predicate_expression,
    explicit_edges,
    uniform_random_k,
    ring,
    full_mesh,
};

struct TopologySpec {
    TopologyKind kind = TopologyKind::full_mesh;
    std::string expression;                        // predicate_expression
    std::vector<std::pair<NodeId, NodeId>> edges;  // explicit_edges
    std::uint32_t k = 0;                           // uniform_random_k
};

// undirected simple graph over nodes 0..N-1, adjacency sorted
struct Graph {
    std::vector<std::vector<NodeId>> adj;

    std::size_t node_count() const { return adj.size(); }

    std::size_t edge_count() const {
        std::size_t deg = 0;
        for (const auto& a : adj) deg += a.size();
        return deg / 2;
    }

    bool has_edge(NodeId a, NodeId b) const {
        const auto& l = adj.at(a);
        return std::binary_search(l.begin(), l.end(), b);
    }
};

namespace detail {

inline Graph from_edge_set(std::size_t n,
                           const std::set<std::pair<NodeId, NodeId>>& edges) {
    Graph g;
    g.adj.resize(n);
    for (auto [a, b] : edges) {
        g.adj[a].push_back(b);
        g.adj[b].push_back(a);
    }
    for (auto& l : g.adj) std::sort(l.begin(), l.end());
    return g;
}

inline std::pair<NodeId, NodeId> ordered(NodeId a, NodeId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace detail

// Builds the requested graph. `rng` is only consumed by uniform_random_k;
// pass the stream derived for purpose "topology" so node streams stay apart.
inline Graph build_topology(const std::vector<NodeDescriptor>& nodes,
                            const TopologySpec& spec, RngStream& rng) {
    const std::size_t n = nodes.size();
    std::set<std::pair<NodeId, NodeId>> edges;

    switch (spec.kind) {
    case TopologyKind::full_mesh:
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b) edges.insert({a, b});
        break;

    case TopologyKind::ring:
        if (n == 2) edges.insert({0, 1});
        else if (n >= 3)
            for (NodeId a = 0; a < n; ++a)
                edges.insert(detail::ordered(a, static_cast<NodeId>((a + 1) % n)));
        break;

    case TopologyKind::explicit_edges:
        for (auto [a, b] : spec.edges) {
            if (a >= n || b >= n)
                throw InvalidSpec("edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") references a node >= " +
                                  std::to_string(n));
            if (a == b) continue; // self-loops dropped
            edges.insert(detail::ordered(a, b));
        }
        break;

    case TopologyKind::uniform_random_k: {
        if (spec.k >= n && !(spec.k == 0 && n == 0))
            throw InvalidSpec("uniform_random_k: k (" + std::to_string(spec.k) +
                              ") must be smaller than the node count (" +
                              std::to_string(n) + ")");
        // every node initiates k edges to distinct uniform partners; the union
        // is deduplicated, so realized degree is >= k but usually larger
        for (NodeId a = 0; a < n; ++a) {
            std::set<NodeId> chosen;
            while (chosen.size() < spec.k) {
                const NodeId b = static_cast<NodeId>(rng.next_below(n));
                if (b != a) chosen.insert(b);
            }
            for (NodeId b : chosen) edges.insert(detail::ordered(a, b));
        }
        break;
    }

    case TopologyKind::predicate_expression: {
        PredicateAst ast = parse_topology_expr(spec.expression);
        // symmetrized: an edge exists if either direction satisfies the predicate
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b)
                if (eval_predicate(ast, nodes[a], nodes[b]) ||
                    eval_predicate(ast, nodes[b], nodes[a]))
                    edges.insert({a, b});
        break;
    }
    }

    return detail::from_edge_set(n, edges);
}

struct Connectivity {
    bool connected = true;
    std::size_t components = 0;
};

// BFS component count; a disconnected topology is legal (callers warn, not fail)
inline Connectivity check_connectivity(const Graph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) return {true, 0};
    std::vector<char> seen(n, 0);
    std::size_t components = 0;
    for (NodeId start = 0; start < n; ++start) {
        if (seen[start]) continue;
        ++components;
        std::queue<NodeId> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const NodeId v = q.front();
            q.pop();
            for (NodeId w : g.adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return {components <= 1, components};
}

} // namespace chainsim::net
