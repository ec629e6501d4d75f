#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "privwalk/errors.hpp"
#include "privwalk/graph.hpp"

namespace privwalk {

enum class AccessModel {
    Ideal,  // neighbor ids and their privacy labels
    Hidden, // neighbor ids only
};

/// How the hidden model bills the query that reads a newly reached sample.
enum class VisitCharging {
    /// The successful label probe already returned the neighbor list, so the
    /// visit is free. The seed's own lookup is billed to seed selection.
    ReuseProbe,
    /// Every visit is a separate query, including the seed's.
    Separate,
};

/// Query accounting for one walk.
class QueryLedger {
public:
    explicit QueryLedger(std::size_t node_count = 0) : queried_(node_count, 0) {}

    std::uint64_t raw_queries() const noexcept { return raw_; }
    /// Queries spent locating the seed (not part of any sample's cost).
    std::uint64_t seed_queries() const noexcept { return seed_; }
    std::uint64_t unique_queried() const noexcept { return unique_; }
    bool was_queried(NodeId v) const { return v < queried_.size() && queried_[v] != 0; }
    std::vector<NodeId> unique_nodes() const {
        std::vector<NodeId> out;
        out.reserve(unique_);
        for (std::size_t v = 0; v < queried_.size(); ++v) {
            if (queried_[v]) {
                out.push_back(static_cast<NodeId>(v));
            }
        }
        return out;
    }
    /// Q(k): queries issued while the walk sat on the k-th sample.
    std::span<const std::uint64_t> per_sample_queries() const noexcept { return per_sample_; }

    void begin_sample() { per_sample_.push_back(0); }

    /// Records a query of v. Returns false when memoization absorbed it.
    bool charge(NodeId v, bool memoize, bool seed_selection = false) {
        if (v >= queried_.size()) {
            queried_.resize(static_cast<std::size_t>(v) + 1, 0);
        }
        const bool seen = queried_[v] != 0;
        if (!seen) {
            queried_[v] = 1;
            ++unique_;
        }
        if (memoize && seen) {
            return false;
        }
        if (seed_selection) {
            ++seed_;
        } else {
            ++raw_;
            if (!per_sample_.empty()) {
                ++per_sample_.back();
            }
        }
        return true;
    }

private:
    std::uint64_t raw_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t unique_ = 0;
    std::vector<std::uint8_t> queried_;
    std::vector<std::uint64_t> per_sample_;
};

/// Answer to querying a public node. Under the ideal model every entry
/// carries the neighbor's label; under the hidden model none does.
class NeighborReport {
public:
    NeighborReport(const LabeledGraph& g, NodeId queried, AccessModel model)
        : graph_(&g), queried_(queried), neighbors_(g.neighbors(queried)), model_(model) {}

    NodeId queried_id() const noexcept { return queried_; }
    AccessModel model() const noexcept { return model_; }
    std::size_t size() const noexcept { return neighbors_.size(); }
    NodeId neighbor(std::size_t i) const { return neighbors_[i]; }
    std::span<const NodeId> neighbor_ids() const noexcept { return neighbors_; }
    std::optional<Label> label(std::size_t i) const {
        if (model_ == AccessModel::Hidden) {
            return std::nullopt;
        }
        return graph_->label(neighbors_[i]);
    }
    std::vector<std::pair<NodeId, std::optional<Label>>> entries() const {
        std::vector<std::pair<NodeId, std::optional<Label>>> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) {
            out.emplace_back(neighbors_[i], label(i));
        }
        return out;
    }

private:
    const LabeledGraph* graph_;
    NodeId queried_;
    std::span<const NodeId> neighbors_;
    AccessModel model_;
};

/// The only window a crawler has onto the graph. Every query is billed to
/// the ledger; nothing else about the graph is reachable through it.
class Crawler {
public:
    Crawler(const LabeledGraph& g, AccessModel model, QueryLedger& ledger, bool memoize = false,
            VisitCharging charging = VisitCharging::ReuseProbe)
        : graph_(&g), model_(model), ledger_(&ledger), memoize_(memoize), charging_(charging) {}

    AccessModel model() const noexcept { return model_; }
    const QueryLedger& ledger() const noexcept { return *ledger_; }

    /// One query. Private nodes still cost a query and raise PrivateNodeError.
    NeighborReport query_node(NodeId v) {
        auto report = try_query(v);
        if (!report) {
            throw PrivateNodeError(v);
        }
        return *report;
    }

    std::optional<NeighborReport> try_query(NodeId v) {
        check_range(v);
        ledger_->charge(v, memoize_);
        if (graph_->is_private(v)) {
            return std::nullopt;
        }
        return NeighborReport(*graph_, v, model_);
    }

    /// Privacy of `parent`'s i-th neighbor. Free under the ideal model; one
    /// probe query under the hidden model.
    bool is_public_via_model(const NeighborReport& parent, std::size_t i) {
        if (model_ == AccessModel::Ideal) {
            return *parent.label(i) == Label::Public;
        }
        return probe(parent.neighbor(i));
    }

    /// As above for a bare id; under the ideal model the label is the one
    /// that arrived with the report listing u.
    bool is_public_via_model(NodeId u) {
        check_range(u);
        if (model_ == AccessModel::Ideal) {
            return graph_->is_public(u);
        }
        return probe(u);
    }

    /// Looks up the walk's seed. Under ReuseProbe hidden access this is billed
    /// as seed selection and the result is reused by the first visit.
    void locate_seed(NodeId seed) {
        check_range(seed);
        if (model_ == AccessModel::Hidden && charging_ == VisitCharging::ReuseProbe) {
            ledger_->charge(seed, memoize_, true);
            if (graph_->is_private(seed)) {
                throw PrivateNodeError(seed);
            }
            probed_public_.push_back(seed);
        }
    }

    /// Reads the neighbor list of the node the walk just moved to, reusing a
    /// successful probe when the charging rule allows it.
    NeighborReport visit(NodeId v) {
        const bool reused = charging_ == VisitCharging::ReuseProbe &&
                            std::find(probed_public_.begin(), probed_public_.end(), v) != probed_public_.end();
        probed_public_.clear();
        if (reused) {
            return NeighborReport(*graph_, v, model_);
        }
        return query_node(v);
    }

private:
    bool probe(NodeId u) {
        const bool pub = try_query(u).has_value();
        if (pub) {
            probed_public_.push_back(u);
        }
        return pub;
    }

    void check_range(NodeId v) const {
        if (v >= graph_->node_count()) {
            throw GraphError("node id " + std::to_string(v) + " out of range");
        }
    }

    const LabeledGraph* graph_;
    AccessModel model_;
    QueryLedger* ledger_;
    bool memoize_;
    VisitCharging charging_;
    std::vector<NodeId> probed_public_;
};

} // namespace privwalk
