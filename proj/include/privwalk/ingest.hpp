#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "privwalk/errors.hpp"
#include "privwalk/graph.hpp"
#include "privwalk/walker.hpp"

namespace privwalk {

namespace detail {

inline bool is_comment_or_blank(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#' || line[first] == '%';
}

/// Splits on whitespace and commas.
inline std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i])) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !is_sep(line[i])) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    return ec == std::errc() && ptr == end;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return in;
}

} // namespace detail

/// Reads a "src dst" edge list and applies the standard pre-processing:
/// directions dropped, duplicates and self-loops removed, restricted to the
/// largest connected component. Dense ids follow ascending source ids and
/// the graph keeps the dense -> source id map. Extra columns are ignored.
inline LabeledGraph load_edge_list(std::istream& in, const std::string& source = "<edges>",
                                   [[maybe_unused]] bool directed_input = false) {
    std::unordered_map<std::uint64_t, NodeId> first_seen;
    std::vector<std::uint64_t> ids;
    std::vector<Edge> pairs;
    auto intern = [&](std::uint64_t id) {
        auto [it, inserted] = first_seen.try_emplace(id, static_cast<NodeId>(ids.size()));
        if (inserted) {
            ids.push_back(id);
        }
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_comment_or_blank(line)) {
            continue;
        }
        const auto tokens = detail::tokenize(line);
        std::uint64_t a = 0;
        std::uint64_t b = 0;
        if (tokens.size() < 2 || !detail::parse_number(tokens[0], a) || !detail::parse_number(tokens[1], b)) {
            throw ParseError(source, line_no, "expected \"src dst\" with non-negative integer ids");
        }
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        if (u != v) {
            pairs.emplace_back(std::min(u, v), std::max(u, v));
        }
    }
    first_seen.clear();

    // renumber so dense order follows source id order
    const std::size_t total = ids.size();
    std::vector<NodeId> order(total);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId x, NodeId y) { return ids[x] < ids[y]; });
    std::vector<NodeId> rank(total);
    for (std::size_t i = 0; i < total; ++i) {
        rank[order[i]] = static_cast<NodeId>(i);
    }
    for (auto& [u, v] : pairs) {
        u = rank[u];
        v = rank[v];
        if (u > v) {
            std::swap(u, v);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    // largest connected component via union-find; ties go to the smallest id
    std::vector<NodeId> parent(total);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [u, v] : pairs) {
        const NodeId ru = find(u);
        const NodeId rv = find(v);
        if (ru != rv) {
            parent[std::max(ru, rv)] = std::min(ru, rv); // root is the component's smallest id
        }
    }
    std::vector<std::size_t> size(total, 0);
    for (NodeId v = 0; v < total; ++v) {
        ++size[find(v)];
    }
    NodeId best = 0;
    std::size_t best_size = 0;
    for (NodeId v = 0; v < total; ++v) {
        if (size[v] > best_size) {
            best_size = size[v];
            best = v;
        }
    }
    if (pairs.empty() || best_size < 2) {
        throw GraphError(source + ": no edges left after pre-processing");
    }

    constexpr auto dropped = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> dense(total, dropped);
    std::vector<std::uint64_t> original;
    original.reserve(best_size);
    for (NodeId v = 0; v < total; ++v) {
        if (find(v) == best) {
            dense[v] = static_cast<NodeId>(original.size());
            original.push_back(ids[order[v]]);
        }
    }
    std::vector<Edge> kept;
    kept.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        if (dense[u] != dropped) {
            kept.emplace_back(dense[u], dense[v]);
        }
    }
    pairs.clear();
    pairs.shrink_to_fit();
    const std::size_t kept_nodes = original.size();
    return build_graph(kept_nodes, std::span<const Edge>(kept), {}, {}, std::move(original));
}

inline LabeledGraph load_edge_list(const std::string& path, bool directed_input = false) {
    auto in = detail::open_input(path);
    return load_edge_list(in, path, directed_input);
}

/// Writes each edge once as "src dst" using source ids.
inline void write_edge_list(std::ostream& out, const LabeledGraph& g) {
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (u < v) {
                out << g.original_id(u) << ' ' << g.original_id(v) << '\n';
            }
        }
    }
}

struct LabelFileOptions {
    /// Reject unknown ids and nodes missing from the file.
    bool strict = false;
    Label missing_label = Label::Public;
};

inline bool parse_label_flag(std::string_view token, Label& label) {
    if (token == "public" || token == "0") {
        label = Label::Public;
        return true;
    }
    if (token == "private" || token == "1") {
        label = Label::Private;
        return true;
    }
    return false;
}

/// Attaches labels from "source_id flag" lines, flag in {public, private, 0, 1}
/// with 1 meaning private.
inline LabeledGraph load_labels(std::istream& in, const LabeledGraph& g, LabelFileOptions options = {},
                                const std::string& source = "<labels>") {
    std::unordered_map<std::uint64_t, NodeId> dense;
    dense.reserve(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        dense.emplace(g.original_id(v), v);
    }
    std::vector<Label> labels(g.node_count(), options.missing_label);
    std::vector<std::uint8_t> listed(g.node_count(), 0);
    std::size_t unknown = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_comment_or_blank(line)) {
            continue;
        }
        const auto tokens = detail::tokenize(line);
        std::uint64_t id = 0;
        Label label{};
        if (tokens.size() < 2 || !detail::parse_number(tokens[0], id) || !parse_label_flag(tokens[1], label)) {
            throw ParseError(source, line_no, "expected \"id flag\" with flag in {public, private, 0, 1}");
        }
        const auto it = dense.find(id);
        if (it == dense.end()) {
            if (options.strict) {
                throw ParseError(source, line_no, "node " + std::to_string(id) + " is not in the graph");
            }
            ++unknown;
            continue;
        }
        labels[it->second] = label;
        listed[it->second] = 1;
    }
    if (unknown > 0) {
        std::cerr << "warning: " << source << ": skipped " << unknown << " labels for nodes not in the graph\n";
    }
    if (options.strict) {
        const auto missing = std::count(listed.begin(), listed.end(), 0);
        if (missing > 0) {
            throw Error(source + ": " + std::to_string(missing) + " graph nodes have no label");
        }
    }
    return g.with_labels(std::move(labels), LabelOrigin{LabelOrigin::Kind::File, 0.0});
}

inline LabeledGraph load_labels(const std::string& path, const LabeledGraph& g, LabelFileOptions options = {}) {
    auto in = detail::open_input(path);
    return load_labels(in, g, options, path);
}

inline void write_labels(std::ostream& out, const LabeledGraph& g) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out << g.original_id(v) << ' ' << (g.is_private(v) ? 1 : 0) << '\n';
    }
}

/// Reads pre-collected samples. Three columns are "id degree public_degree";
/// four columns are a walk dump "index id degree public_degree".
inline WalkRecord load_sample_records(std::istream& in, const std::string& source = "<samples>") {
    WalkRecord record;
    record.mode = PublicDegreeMode::ExactHidden;
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_comment_or_blank(line)) {
            continue;
        }
        const auto tokens = detail::tokenize(line);
        if (columns == 0) {
            columns = tokens.size();
            if (columns != 3 && columns != 4) {
                throw ParseError(source, line_no, "expected 3 or 4 columns");
            }
        } else if (tokens.size() != columns) {
            throw ParseError(source, line_no, "column count changed from " + std::to_string(columns));
        }
        const std::size_t off = columns - 3;
        Sample s;
        if (!detail::parse_number(tokens[off], s.node) || !detail::parse_number(tokens[off + 1], s.degree) ||
            !detail::parse_number(tokens[off + 2], s.public_degree)) {
            throw ParseError(source, line_no, "malformed sample");
        }
        if (!(s.public_degree >= 0.0) || s.public_degree > static_cast<double>(s.degree)) {
            throw ParseError(source, line_no, "public-degree must lie in [0, degree]");
        }
        record.samples.push_back(s);
    }
    return record;
}

inline WalkRecord load_sample_records(const std::string& path) {
    auto in = detail::open_input(path);
    return load_sample_records(in, path);
}

} // namespace privwalk
