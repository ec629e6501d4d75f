#pragma once

// Small synthetic graphs for tests. Not part of the library surface.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "privwalk/graph.hpp"

namespace privwalk::testing {

inline std::vector<Edge> path_edges(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i + 1 < n; ++i) {
        e.emplace_back(i, i + 1);
    }
    return e;
}

inline LabeledGraph path_graph(std::size_t n) { return build_graph(n, path_edges(n)); }

/// Star K_{1,leaves} with the hub at id 0.
inline LabeledGraph star_graph(std::size_t leaves) {
    std::vector<Edge> e;
    for (NodeId i = 1; i <= leaves; ++i) {
        e.emplace_back(0, i);
    }
    return build_graph(leaves + 1, e);
}

/// Circulant graph: node i linked to i +- 1 .. i +- degree/2. degree must be even.
inline LabeledGraph ring_lattice(std::size_t n, std::size_t degree) {
    std::set<Edge> e;
    for (NodeId i = 0; i < n; ++i) {
        for (std::size_t s = 1; s <= degree / 2; ++s) {
            const auto j = static_cast<NodeId>((i + s) % n);
            e.emplace(std::min(i, j), std::max(i, j));
        }
    }
    return build_graph(n, std::vector<Edge>(e.begin(), e.end()));
}

/// Random spanning tree plus `extra` random chords; always connected.
inline std::vector<Edge> random_connected_edges(std::size_t n, std::size_t extra, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<Edge> e;
    for (NodeId v = 1; v < n; ++v) {
        std::uniform_int_distribution<NodeId> pick(0, v - 1);
        const NodeId u = pick(rng);
        e.emplace(u, v);
    }
    std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(n - 1));
    std::size_t added = 0;
    std::size_t attempts = 0;
    while (added < extra && attempts < extra * 50 + 100) {
        ++attempts;
        const NodeId a = any(rng);
        const NodeId b = any(rng);
        if (a != b && e.emplace(std::min(a, b), std::max(a, b)).second) {
            ++added;
        }
    }
    return {e.begin(), e.end()};
}

inline LabeledGraph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
    return build_graph(n, random_connected_edges(n, extra, seed));
}

/// Barabasi-Albert preferential attachment: a clique on k + 1 nodes, then each
/// new node links to k distinct existing nodes chosen proportionally to degree.
inline LabeledGraph preferential_attachment(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::vector<NodeId> endpoints; // each node repeated once per incident edge
    for (NodeId i = 0; i <= k; ++i) {
        for (NodeId j = i + 1; j <= k; ++j) {
            edges.emplace_back(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }
    std::vector<NodeId> targets;
    for (auto v = static_cast<NodeId>(k + 1); v < n; ++v) {
        targets.clear();
        while (targets.size() < k) {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            const NodeId t = endpoints[pick(rng)];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(t);
            }
        }
        for (NodeId t : targets) {
            edges.emplace_back(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    return build_graph(n, edges);
}

/// Ten-node example graph with nodes 1 and 2 private, stored with dense id
/// = label - 1. Public-clusters: {4,5,6,7,9} (star around 5), {8,10}, {3}.
/// Edges at private nodes are a reconstruction; node 4's neighbors are {2, 5}.
inline LabeledGraph example_graph() {
    auto id = [](int label) { return static_cast<NodeId>(label - 1); };
    const std::vector<std::pair<int, int>> labeled = {
        {4, 5}, {5, 6}, {5, 7}, {5, 9}, {8, 10},                    // public-public
        {1, 2}, {2, 4}, {2, 3}, {1, 3}, {1, 5}, {1, 8}, {2, 10}, {1, 7}, // touching private nodes
    };
    std::vector<Edge> edges;
    for (auto [a, b] : labeled) {
        edges.emplace_back(id(a), id(b));
    }
    std::vector<Label> labels(10, Label::Public);
    labels[id(1)] = Label::Private;
    labels[id(2)] = Label::Private;
    return build_graph(10, edges, labels);
}

inline constexpr NodeId ex(int label) { return static_cast<NodeId>(label - 1); }

} // namespace privwalk::testing
