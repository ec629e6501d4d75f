#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "privwalk/privwalk.hpp"

using namespace privwalk;

namespace {

std::ofstream open_output(const std::string& path) {
    if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    return out;
}

/// Graph plus labels from a file or a Bernoulli(p) draw.
struct GraphInput {
    std::string edges;
    bool directed = false;
    std::string labels;
    bool strict = false;
    double p = 0.0;
    std::uint64_t label_seed = 1;

    void attach(CLI::App* cmd, bool with_labels) {
        cmd->add_option("-g,--graph", edges, "edge list")->required()->check(CLI::ExistingFile);
        cmd->add_flag("--directed", directed, "input lists directed arcs");
        if (with_labels) {
            cmd->add_option("-l,--labels", labels, "label file (id flag, 1 = private)")->check(CLI::ExistingFile);
            cmd->add_flag("--strict-labels", strict, "reject unknown or missing ids");
            cmd->add_option("-p,--p", p, "private probability when no label file is given")
                ->check(CLI::Range(0.0, 1.0));
            cmd->add_option("--label-seed", label_seed, "seed of the label draw");
        }
    }

    LabeledGraph load() const {
        auto g = load_edge_list(edges, directed);
        if (!labels.empty()) {
            return load_labels(labels, g, LabelFileOptions{strict, Label::Public});
        }
        return p > 0.0 ? assign_labels_bernoulli(g, p, label_seed) : g;
    }
};

void print_graph_summary(const LabeledGraph& g) {
    std::cout << "nodes " << g.node_count() << "\nedges " << g.edge_count() << "\naverage_degree "
              << g.average_degree() << "\nprivate_nodes " << g.private_count() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-walk size and average-degree estimation with private nodes"};
    app.require_subcommand(1);
    std::cout.precision(12);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "clean an edge list and keep its largest connected component");
    GraphInput ingest_in;
    ingest_in.attach(ingest, false);
    std::string ingest_out;
    ingest->add_option("-o,--output", ingest_out, "write the cleaned edge list here");

    // labels
    auto* labels = app.add_subcommand("labels", "draw Bernoulli privacy labels");
    GraphInput labels_in;
    labels_in.attach(labels, false);
    double label_p = 0.0;
    std::uint64_t label_seed = 1;
    std::string labels_out;
    labels->add_option("-p,--p", label_p, "private probability")->required()->check(CLI::Range(0.0, 1.0));
    labels->add_option("--seed", label_seed, "random seed");
    labels->add_option("-o,--output", labels_out, "label file")->required();

    // walk
    auto* walk = app.add_subcommand("walk", "run one random walk and dump its samples");
    GraphInput walk_in;
    walk_in.attach(walk, true);
    std::size_t walk_length = 1000;
    std::string walk_mode = "exact_ideal";
    std::uint64_t walk_seed = 1;
    std::optional<std::uint64_t> walk_start;
    bool walk_memoize = false;
    bool walk_separate = false;
    std::string walk_out;
    walk->add_option("-r,--length", walk_length, "number of samples")->check(CLI::PositiveNumber);
    walk->add_option("--mode", walk_mode, "exact_ideal, exact_hidden or approx_hidden");
    walk->add_option("--seed", walk_seed, "random seed");
    walk->add_option("--start", walk_start, "source id of the seed node (default: random node of C*)");
    walk->add_flag("--memoize", walk_memoize, "charge repeated queries of a node once");
    walk->add_flag("--separate-visit-charge", walk_separate, "do not reuse a label probe as the visit query");
    walk->add_option("-o,--output", walk_out, "sample dump");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "estimate size, average degree and privacy rate from samples");
    std::string samples_path;
    std::optional<std::size_t> gap;
    double gap_fraction = 0.025;
    estimate->add_option("samples", samples_path, "sample file (id degree pubdeg, or a walk dump)")
        ->required()
        ->check(CLI::ExistingFile);
    estimate->add_option("-m,--gap", gap, "minimum index gap of collision pairs");
    estimate->add_option("--gap-fraction", gap_fraction, "gap as a fraction of the sample count")
        ->check(CLI::Range(0.0, 1.0));

    // theory
    auto* theory = app.add_subcommand("theory", "closed-form expectations and convergence values");
    GraphInput theory_in;
    theory_in.attach(theory, true);
    std::vector<double> grid{0.0, 0.03, 0.06, 0.09, 0.12, 0.15, 0.18, 0.21, 0.24, 0.27, 0.30};
    std::string theory_out;
    theory->add_option("--grid", grid, "private probabilities of the table")->delimiter(',');
    theory->add_option("-o,--output", theory_out, "theory CSV (default: stdout)");

    // experiment and census
    auto* experiment = app.add_subcommand("experiment", "repeated-trial NRMSE experiment");
    auto* census = app.add_subcommand("census", "query cost of exact versus approximated public-degrees");
    std::string config_path;
    std::string output_override;
    std::optional<unsigned> threads_override;
    for (auto* cmd : {experiment, census}) {
        cmd->add_option("-c,--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        cmd->add_option("-o,--output", output_override, "output directory (overrides output_dir)");
        cmd->add_option("-j,--threads", threads_override, "worker threads (overrides threads)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            const auto g = ingest_in.load();
            print_graph_summary(g);
            if (!ingest_out.empty()) {
                auto out = open_output(ingest_out);
                write_edge_list(out, g);
            }
        } else if (labels->parsed()) {
            const auto g = assign_labels_bernoulli(labels_in.load(), label_p, label_seed);
            auto out = open_output(labels_out);
            write_labels(out, g);
            std::cout << "private_nodes " << g.private_count() << " of " << g.node_count() << '\n';
        } else if (walk->parsed()) {
            const auto g = walk_in.load();
            const auto view = largest_public_cluster(g);
            NodeId start = 0;
            if (walk_start) {
                const auto& ids = g.original_ids();
                const auto it = std::find(ids.begin(), ids.end(), *walk_start);
                if (it == ids.end()) {
                    throw Error("start node " + std::to_string(*walk_start) + " is not in the graph");
                }
                start = static_cast<NodeId>(it - ids.begin());
            } else {
                start = pick_seed_node(view, derive_seed(walk_seed, 2));
            }
            const WalkOptions options{parse_public_degree_mode(walk_mode), walk_memoize,
                                      walk_separate ? VisitCharging::Separate : VisitCharging::ReuseProbe};
            auto record = run_walk(g, view, start, walk_length, options, derive_seed(walk_seed, 3));
            // report source ids
            for (auto& s : record.samples) {
                s.node = g.original_id(static_cast<NodeId>(s.node));
            }
            if (!walk_out.empty()) {
                auto out = open_output(walk_out);
                write_walk_dump(out, record);
            }
            std::cout << "samples " << record.size() << "\nraw_queries " << record.ledger.raw_queries()
                      << "\nseed_queries " << record.ledger.seed_queries() << "\nunique_queried "
                      << record.ledger.unique_queried() << "\nqueries_per_sample "
                      << static_cast<double>(record.ledger.raw_queries()) / static_cast<double>(record.size())
                      << "\ncluster_size " << view.member_count() << '\n';
        } else if (estimate->parsed()) {
            const auto record = load_sample_records(samples_path);
            const std::size_t m = gap ? *gap : default_collision_gap(record.size(), gap_fraction);
            const auto e = estimate_all(record, m);
            std::cout << "samples " << e.r << "\nm " << e.m << "\npairs " << e.size.pair_count << "\ncollisions "
                      << e.size.collisions << "\nn_nc " << e.size.n_nc << "\nn_hat " << e.size.n_hat
                      << "\ndavg_smooth " << e.degree.davg_smooth << "\ndavg_hat " << e.degree.davg_hat
                      << "\np_hat_n " << e.privacy.p_hat_n << "\np_hat_avg " << e.privacy.p_hat_avg << '\n';
        } else if (theory->parsed()) {
            const auto g = theory_in.load();
            const auto moments = DegreeMoments::of(g);
            std::vector<TheoryRow> rows;
            const bool fixed = !theory_in.labels.empty() || theory_in.p > 0.0;
            for (double p : grid) {
                const auto labeled = fixed ? g : assign_labels_bernoulli(g, p, theory_in.label_seed);
                rows.push_back({p, expected_errors(moments, p), moments.average(),
                                expected_query_ratios(largest_public_cluster(labeled), labeled)});
            }
            if (theory_out.empty()) {
                write_theory_csv(std::cout, rows);
            } else {
                auto out = open_output(theory_out);
                write_theory_csv(out, rows);
            }
            if (fixed) {
                const auto view = largest_public_cluster(g);
                const auto cv = convergence_values(g, view);
                std::ostream& info = theory_out.empty() ? std::cerr : std::cout;
                info << "n " << g.node_count() << "\nn_star " << cv.n_star << "\nn_tilde " << cv.n_tilde
                          << "\ndavg " << g.average_degree() << "\ndavg_star " << cv.davg_star << "\ndavg_tilde "
                          << cv.davg_tilde << '\n';
            }
        } else if (experiment->parsed() || census->parsed()) {
            auto config = load_config(config_path);
            if (!output_override.empty()) {
                config.output_dir = output_override;
            }
            if (threads_override) {
                config.threads = *threads_override;
            }
            if (config.dataset.empty()) {
                throw Error(config_path + ": dataset is required");
            }
            const auto g = load_edge_list(config.dataset, config.directed);
            if (experiment->parsed()) {
                const auto result = run_experiment(g, config);
                write_experiment(result, config.output_dir);
                write_nrmse_csv(std::cout, result.nrmse);
            } else {
                const auto rows = query_census(g, config);
                std::filesystem::create_directories(config.output_dir);
                auto out = open_output((std::filesystem::path(config.output_dir) / "census.csv").string());
                write_census_csv(out, rows);
                write_census_csv(std::cout, rows);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
