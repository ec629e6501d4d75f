#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "privwalk/errors.hpp"

namespace privwalk {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

enum class Label : std::uint8_t { Public = 0, Private = 1 };

/// Where a labeling came from. `p` is only meaningful for Bernoulli labels.
struct LabelOrigin {
    enum class Kind { AllPublic, Bernoulli, File };
    Kind kind = Kind::AllPublic;
    double p = 0.0;
};

struct BuildOptions {
    /// Silently drop self-loops and duplicate edges instead of rejecting them.
    bool drop_invalid = false;
    /// Skip the connectivity check (used only by ingest before LCC extraction).
    bool allow_disconnected = false;
};

namespace detail {

struct Topology {
    std::vector<std::uint64_t> offsets; // size n + 1
    std::vector<NodeId> neighbors;      // sorted per node
    std::vector<std::uint64_t> original_ids;
};

inline bool is_connected(const Topology& t) {
    const std::size_t n = t.offsets.size() - 1;
    if (n == 0) {
        return false;
    }
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (auto i = t.offsets[v]; i < t.offsets[v + 1]; ++i) {
            const NodeId u = t.neighbors[i];
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == n;
}

} // namespace detail

/// Undirected, connected, simple graph with one privacy label per node.
/// The adjacency is shared between copies; relabeling creates a new value
/// that reuses it.
class LabeledGraph {
public:
    LabeledGraph() = default;

    std::size_t node_count() const noexcept { return topo_ ? topo_->offsets.size() - 1 : 0; }
    std::uint64_t edge_count() const noexcept { return degree_sum() / 2; }
    std::uint64_t degree_sum() const noexcept { return topo_ ? topo_->neighbors.size() : 0; }
    double average_degree() const noexcept {
        return node_count() == 0 ? 0.0 : static_cast<double>(degree_sum()) / static_cast<double>(node_count());
    }

    std::size_t degree(NodeId v) const { return topo_->offsets[v + 1] - topo_->offsets[v]; }
    std::span<const NodeId> neighbors(NodeId v) const {
        return {topo_->neighbors.data() + topo_->offsets[v], degree(v)};
    }

    Label label(NodeId v) const { return labels_[v]; }
    bool is_private(NodeId v) const { return labels_[v] == Label::Private; }
    bool is_public(NodeId v) const { return labels_[v] == Label::Public; }
    std::span<const Label> labels() const noexcept { return labels_; }
    std::size_t private_count() const noexcept {
        return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::Private));
    }
    const LabelOrigin& origin() const noexcept { return origin_; }

    /// Identifier in the source file; the dense id when none was recorded.
    std::uint64_t original_id(NodeId v) const {
        return topo_->original_ids.empty() ? v : topo_->original_ids[v];
    }
    std::span<const std::uint64_t> original_ids() const noexcept { return topo_->original_ids; }

    LabeledGraph with_labels(std::vector<Label> labels, LabelOrigin origin) const {
        if (labels.size() != node_count()) {
            throw GraphError("label count " + std::to_string(labels.size()) + " does not match node count " +
                             std::to_string(node_count()));
        }
        LabeledGraph g;
        g.topo_ = topo_;
        g.labels_ = std::move(labels);
        g.origin_ = origin;
        return g;
    }

    LabeledGraph all_public() const {
        return with_labels(std::vector<Label>(node_count(), Label::Public), LabelOrigin{});
    }

    friend LabeledGraph build_graph(std::size_t, std::span<const Edge>, std::vector<Label>, BuildOptions,
                                    std::vector<std::uint64_t>);

private:
    std::shared_ptr<const detail::Topology> topo_;
    std::vector<Label> labels_;
    LabelOrigin origin_;
};

/// Builds a graph on ids 0..node_count-1. An empty `labels` means all public.
/// `original_ids`, when given, maps each dense id back to its source id.
inline LabeledGraph build_graph(std::size_t node_count, std::span<const Edge> edges, std::vector<Label> labels = {},
                                BuildOptions options = {}, std::vector<std::uint64_t> original_ids = {}) {
    if (node_count == 0 || edges.empty()) {
        throw GraphError("graph needs at least one node and one edge");
    }
    if (node_count > std::numeric_limits<NodeId>::max()) {
        throw GraphError("node count exceeds 32-bit id range");
    }
    if (!original_ids.empty() && original_ids.size() != node_count) {
        throw GraphError("original id map size does not match node count");
    }
    std::vector<Edge> arcs;
    arcs.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        if (u >= node_count || v >= node_count) {
            throw GraphError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") has an out-of-range id");
        }
        if (u == v) {
            if (options.drop_invalid) {
                continue;
            }
            throw GraphError("self-loop on node " + std::to_string(u));
        }
        arcs.emplace_back(u, v);
        arcs.emplace_back(v, u);
    }
    std::sort(arcs.begin(), arcs.end());
    const auto dup = std::adjacent_find(arcs.begin(), arcs.end());
    if (dup != arcs.end()) {
        if (!options.drop_invalid) {
            throw GraphError("duplicate edge (" + std::to_string(dup->first) + ", " + std::to_string(dup->second) + ")");
        }
        arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    }

    auto topo = std::make_shared<detail::Topology>();
    topo->offsets.assign(node_count + 1, 0);
    for (const auto& a : arcs) {
        ++topo->offsets[a.first + 1];
    }
    std::partial_sum(topo->offsets.begin(), topo->offsets.end(), topo->offsets.begin());
    topo->neighbors.reserve(arcs.size());
    for (const auto& a : arcs) {
        topo->neighbors.push_back(a.second);
    }
    topo->original_ids = std::move(original_ids);
    if (!options.allow_disconnected && !detail::is_connected(*topo)) {
        throw GraphError("graph is not connected; extract the largest connected component first");
    }

    LabeledGraph g;
    g.topo_ = std::move(topo);
    if (labels.empty()) {
        labels.assign(node_count, Label::Public);
    } else if (labels.size() != node_count) {
        throw GraphError("label count does not match node count");
    }
    g.labels_ = std::move(labels);
    g.origin_ = LabelOrigin{};
    return g;
}

inline LabeledGraph build_graph(std::size_t node_count, const std::vector<Edge>& edges,
                                std::vector<Label> labels = {}, BuildOptions options = {}) {
    return build_graph(node_count, std::span<const Edge>(edges), std::move(labels), options);
}

/// Each node independently private with probability p. Deterministic in seed.
inline LabeledGraph assign_labels_bernoulli(const LabeledGraph& g, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw GraphError("privacy probability must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<Label> labels(g.node_count());
    for (auto& l : labels) {
        l = coin(rng) ? Label::Private : Label::Public;
    }
    return g.with_labels(std::move(labels), LabelOrigin{LabelOrigin::Kind::Bernoulli, p});
}

/// The largest public-cluster C* of a labeled graph together with the
/// public-degree of every member and a histogram of all public-cluster sizes.
class PublicClusterView {
public:
    bool is_member(NodeId v) const { return member_[v] != 0; }
    std::size_t member_count() const noexcept { return members_.size(); }
    /// Sorted member ids.
    std::span<const NodeId> members() const noexcept { return members_; }
    /// Number of neighbors of v inside C*; zero for non-members.
    std::uint32_t public_degree(NodeId v) const { return public_degree_[v]; }
    std::uint64_t public_degree_sum() const noexcept { return public_degree_sum_; }
    double average_public_degree() const noexcept {
        return static_cast<double>(public_degree_sum_) / static_cast<double>(members_.size());
    }
    /// cluster size -> number of public-clusters with that size.
    const std::map<std::size_t, std::size_t>& cluster_census() const noexcept { return census_; }

    friend PublicClusterView largest_public_cluster(const LabeledGraph& g);

private:
    std::vector<std::uint8_t> member_;
    std::vector<NodeId> members_;
    std::vector<std::uint32_t> public_degree_;
    std::uint64_t public_degree_sum_ = 0;
    std::map<std::size_t, std::size_t> census_;
};

/// Ties between equally large clusters go to the one holding the smallest id.
inline PublicClusterView largest_public_cluster(const LabeledGraph& g) {
    const std::size_t n = g.node_count();
    constexpr auto unassigned = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> component(n, unassigned);
    std::vector<NodeId> stack;
    std::uint32_t next = 0;
    std::uint32_t best = unassigned;
    std::size_t best_size = 0;
    PublicClusterView view;

    for (NodeId s = 0; s < n; ++s) {
        if (g.is_private(s) || component[s] != unassigned) {
            continue;
        }
        const std::uint32_t id = next++;
        std::size_t size = 1;
        component[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (NodeId u : g.neighbors(v)) {
                if (g.is_public(u) && component[u] == unassigned) {
                    component[u] = id;
                    ++size;
                    stack.push_back(u);
                }
            }
        }
        ++view.census_[size];
        if (size > best_size) {
            best_size = size;
            best = id;
        }
    }
    if (best == unassigned) {
        throw GraphError("graph has no public nodes");
    }

    view.member_.assign(n, 0);
    view.public_degree_.assign(n, 0);
    view.members_.reserve(best_size);
    for (NodeId v = 0; v < n; ++v) {
        if (component[v] != best) {
            continue;
        }
        view.member_[v] = 1;
        view.members_.push_back(v);
        std::uint32_t pd = 0;
        for (NodeId u : g.neighbors(v)) {
            pd += component[u] == best ? 1 : 0;
        }
        view.public_degree_[v] = pd;
        view.public_degree_sum_ += pd;
    }
    return view;
}

} // namespace privwalk
