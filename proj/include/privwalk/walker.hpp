#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <unordered_map>
#include <vector>

#include "privwalk/access.hpp"
#include "privwalk/errors.hpp"
#include "privwalk/graph.hpp"

namespace privwalk {

/// How the walk obtains the public-degree of each sample.
enum class PublicDegreeMode {
    ExactIdeal,   // labels arrive with every report, no extra cost
    ExactHidden,  // probe every neighbor of every sample
    ApproxHidden, // d * a / b from the walk's own neighbor selections
};

constexpr AccessModel access_model(PublicDegreeMode mode) noexcept {
    return mode == PublicDegreeMode::ExactIdeal ? AccessModel::Ideal : AccessModel::Hidden;
}

struct Sample {
    std::uint64_t node = 0;
    std::uint64_t degree = 0;
    double public_degree = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Per-node neighbor selection tallies, accumulated over every visit.
struct SelectionCounters {
    std::uint64_t successes = 0; // a: selections that hit a public neighbor
    std::uint64_t total = 0;     // b: all selections
};

struct WalkRecord {
    std::vector<Sample> samples;
    PublicDegreeMode mode = PublicDegreeMode::ExactHidden;
    QueryLedger ledger;
    std::unordered_map<std::uint64_t, SelectionCounters> counters;

    std::size_t size() const noexcept { return samples.size(); }
};

struct WalkOptions {
    PublicDegreeMode mode = PublicDegreeMode::ExactIdeal;
    bool memoize = false;
    VisitCharging charging = VisitCharging::ReuseProbe;
};

/// Random walk restricted to public nodes: a neighbor is drawn uniformly
/// (with replacement) until a public one comes up, then the walk moves there.
/// The selection after the last sample is also performed so every sample has
/// at least one successful selection.
inline WalkRecord run_walk(const LabeledGraph& g, const PublicClusterView& view, NodeId seed, std::size_t r,
                           const WalkOptions& options, std::uint64_t rng_seed) {
    if (r == 0) {
        throw Error("walk length must be at least 1");
    }
    if (seed >= g.node_count()) {
        throw GraphError("seed id out of range");
    }
    if (g.is_private(seed)) {
        throw PrivateNodeError(seed);
    }
    if (!view.is_member(seed)) {
        throw Error("seed " + std::to_string(seed) + " is not on the largest public-cluster");
    }

    WalkRecord record;
    record.mode = options.mode;
    record.ledger = QueryLedger(g.node_count());
    record.samples.reserve(r);

    const AccessModel model = access_model(options.mode);
    if (view.public_degree(seed) == 0) {
        if (r > 1 || options.mode == PublicDegreeMode::ApproxHidden) {
            throw StuckWalkError("seed has no public neighbor; the largest public-cluster is a single node");
        }
        Crawler crawler(g, model, record.ledger, options.memoize, options.charging);
        crawler.locate_seed(seed);
        record.ledger.begin_sample();
        const auto report = crawler.visit(seed);
        record.samples.push_back({seed, report.size(), 0.0});
        return record;
    }

    std::mt19937_64 rng(rng_seed);
    Crawler crawler(g, model, record.ledger, options.memoize, options.charging);
    crawler.locate_seed(seed);
    std::vector<std::uint8_t> known_public;

    NodeId current = seed;
    for (std::size_t k = 0; k < r; ++k) {
        record.ledger.begin_sample();
        const NeighborReport report = crawler.visit(current);
        const std::size_t d = report.size();

        double public_degree = 0.0;
        if (options.mode == PublicDegreeMode::ExactIdeal) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < d; ++i) {
                count += *report.label(i) == Label::Public ? 1 : 0;
            }
            public_degree = static_cast<double>(count);
        } else if (options.mode == PublicDegreeMode::ExactHidden) {
            known_public.assign(d, 0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < d; ++i) {
                known_public[i] = crawler.is_public_via_model(report, i) ? 1 : 0;
                count += known_public[i];
            }
            public_degree = static_cast<double>(count);
        }
        record.samples.push_back({current, d, public_degree});

        auto& tally = record.counters[current];
        std::uniform_int_distribution<std::size_t> pick(0, d - 1);
        while (true) {
            const std::size_t i = pick(rng);
            ++tally.total;
            bool is_public = false;
            switch (options.mode) {
            case PublicDegreeMode::ExactIdeal:
                is_public = *report.label(i) == Label::Public;
                break;
            case PublicDegreeMode::ExactHidden:
                is_public = known_public[i] != 0;
                break;
            case PublicDegreeMode::ApproxHidden:
                is_public = crawler.is_public_via_model(report, i);
                break;
            }
            if (is_public) {
                ++tally.successes;
                current = report.neighbor(i);
                break;
            }
        }
    }

    if (options.mode == PublicDegreeMode::ApproxHidden) {
        for (auto& s : record.samples) {
            const auto& c = record.counters.at(s.node);
            s.public_degree = static_cast<double>(s.degree) * static_cast<double>(c.successes) /
                              static_cast<double>(c.total);
        }
    }
    return record;
}

/// pi_i = d*_i / D* on C*, zero elsewhere.
inline std::vector<double> stationary_distribution(const PublicClusterView& view, std::size_t node_count) {
    if (view.public_degree_sum() == 0) {
        throw Error("public-degree sum is zero; stationary distribution undefined");
    }
    std::vector<double> pi(node_count, 0.0);
    const double total = static_cast<double>(view.public_degree_sum());
    for (NodeId v : view.members()) {
        pi[v] = static_cast<double>(view.public_degree(v)) / total;
    }
    return pi;
}

/// One line per sample: "index node degree public_degree", index from 1.
inline void write_walk_dump(std::ostream& out, const WalkRecord& record) {
    const auto old_precision = out.precision(17);
    std::size_t k = 1;
    for (const auto& s : record.samples) {
        out << k++ << ' ' << s.node << ' ' << s.degree << ' ' << s.public_degree << '\n';
    }
    out.precision(old_precision);
}

} // namespace privwalk
