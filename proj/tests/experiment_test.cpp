#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "privwalk/experiment.hpp"
#include "support/generators.hpp"

using namespace privwalk;
using namespace privwalk::testing;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

const NrmseRow& row(const ExperimentResult& r, double p, const std::string& name) {
    for (const auto& x : r.nrmse) {
        if (x.p == p && x.estimator == name) {
            return x;
        }
    }
    throw std::runtime_error("missing row " + name);
}

std::string csv(const ExperimentResult& r) {
    std::ostringstream out;
    write_nrmse_csv(out, r.nrmse);
    write_privacy_csv(out, r.privacy);
    return out.str();
}

} // namespace

TEST(Config, ParsesEveryKey) {
    const auto c = parse("dataset = data/edges.txt   # comment\n"
                         "directed = true\n"
                         "p_grid = 0:0.1:0.3\n"
                         "pubdeg_mode = approx_hidden\n"
                         "memoize = yes\n"
                         "visit_charging = separate\n"
                         "sample_fractions = 0.01, 0.02\n"
                         "m_fraction = 0.05\n"
                         "trials = 20\n"
                         "seed = 9\n"
                         "output_dir = out\n"
                         "reference = convergence\n"
                         "threads = 2\n");
    EXPECT_EQ(c.dataset, "data/edges.txt");
    EXPECT_TRUE(c.directed);
    ASSERT_EQ(c.p_grid.size(), 4u);
    EXPECT_NEAR(c.p_grid[3], 0.3, 1e-12);
    EXPECT_EQ(c.mode, PublicDegreeMode::ApproxHidden);
    EXPECT_TRUE(c.memoize);
    EXPECT_EQ(c.charging, VisitCharging::Separate);
    EXPECT_EQ(c.sample_fractions, (std::vector<double>{0.01, 0.02}));
    EXPECT_EQ(c.m_fraction, 0.05);
    EXPECT_EQ(c.trials, 20u);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.output_dir, "out");
    EXPECT_EQ(c.reference, Reference::Convergence);
    EXPECT_EQ(c.threads, 2u);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse("bogus = 1\n"), ParseError);
    EXPECT_THROW(parse("no equals sign\n"), ParseError);
    EXPECT_THROW(parse("p_grid = 1.5\n"), Error);
    EXPECT_THROW(parse("trials = 0\n"), Error);
    EXPECT_THROW(parse("pubdeg_mode = psychic\n"), Error);
    EXPECT_THROW(parse("m_fraction = 2\n"), Error);
}

TEST(Nrmse, SingleTrialIsAbsoluteRelativeError) {
    EXPECT_DOUBLE_EQ(nrmse({12.0}, {10.0}), 0.2);
    EXPECT_DOUBLE_EQ(nrmse({8.0}, {10.0}), 0.2);
    EXPECT_DOUBLE_EQ(nrmse({11.0, 9.0}, {10.0, 10.0}), 0.1);
    EXPECT_TRUE(std::isnan(nrmse({}, {})));
    EXPECT_DOUBLE_EQ(median_of({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median_of({4, 1, 2, 3}), 2.5);
}

TEST(Experiment, OneTrialMatchesDirectComputation) {
    const auto g = random_connected_graph(200, 400, 3);
    ExperimentConfig c;
    c.trials = 1;
    c.sample_sizes = {400};
    c.seed = 5;
    const auto result = run_experiment(g, c);

    const auto seeds = TrialSeeds::of(5, 0);
    const auto view = largest_public_cluster(g);
    const auto rec = run_walk(g, view, pick_seed_node(view, seeds.seed_node), 400, {}, seeds.walk);
    const auto est = estimate_all(rec, default_collision_gap(400));
    EXPECT_DOUBLE_EQ(row(result, 0.0, "nc_size").nrmse, std::fabs(est.size.n_nc / 200.0 - 1.0));
    EXPECT_DOUBLE_EQ(row(result, 0.0, "smooth_avg_degree").nrmse,
                     std::fabs(est.degree.davg_smooth / g.average_degree() - 1.0));
}

TEST(Experiment, NoPrivacyMeansPriorAndProposedCoincide) {
    const auto g = random_connected_graph(300, 600, 4);
    ExperimentConfig c;
    c.trials = 30;
    c.sample_fractions = {0.5};
    const auto result = run_experiment(g, c);
    EXPECT_EQ(row(result, 0.0, "nc_size").nrmse, row(result, 0.0, "proposed_size").nrmse);
    EXPECT_EQ(row(result, 0.0, "smooth_avg_degree").nrmse, row(result, 0.0, "proposed_avg_degree").nrmse);
    for (const char* cv : {"nc_size_cv", "proposed_size_cv", "smooth_avg_degree_cv", "proposed_avg_degree_cv"}) {
        EXPECT_EQ(row(result, 0.0, cv).nrmse, 0.0) << cv;
    }
    EXPECT_DOUBLE_EQ(row(result, 0.0, "nc_size").mean_query_ratio, 1.0);
    for (const auto& p : result.privacy) {
        EXPECT_EQ(p.mean, 0.0);
    }
}

TEST(Experiment, ProposedConvergenceValuesAreCloser) {
    const auto g = preferential_attachment(2000, 5, 6);
    ExperimentConfig c;
    c.p_grid = {0.1, 0.3};
    c.trials = 20;
    c.sample_fractions = {0.1};
    const auto result = run_experiment(g, c);
    for (double p : c.p_grid) {
        EXPECT_LT(row(result, p, "proposed_size_cv").nrmse, row(result, p, "nc_size_cv").nrmse);
        EXPECT_LT(row(result, p, "proposed_avg_degree_cv").nrmse, row(result, p, "smooth_avg_degree_cv").nrmse);
    }
    ASSERT_EQ(result.theory.size(), 2u);
    EXPECT_NEAR(result.theory[1].expected.expected_n_star, 1400.0, 1e-9);
}

TEST(Experiment, ConvergenceReferenceShrinksWithLength) {
    const auto g = preferential_attachment(1000, 5, 7);
    ExperimentConfig c;
    c.p_grid = {0.2};
    c.trials = 30;
    c.sample_fractions = {0.05, 0.5};
    c.reference = Reference::Convergence;
    const auto result = run_experiment(g, c);
    double small = 0;
    double large = 0;
    for (const auto& r : result.nrmse) {
        if (r.estimator == "proposed_size") {
            (r.sample_size == 50 ? small : large) = r.nrmse;
        }
    }
    EXPECT_LT(large, small);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
    const auto g = preferential_attachment(500, 4, 8);
    ExperimentConfig c;
    c.p_grid = {0.0, 0.2};
    c.trials = 24;
    c.sample_fractions = {0.2};
    c.mode = PublicDegreeMode::ApproxHidden;
    c.threads = 1;
    const auto a = run_experiment(g, c);
    c.threads = 4;
    const auto b = run_experiment(g, c);
    EXPECT_EQ(csv(a), csv(b));
    const auto again = run_experiment(g, c);
    EXPECT_EQ(csv(b), csv(again));
}

TEST(Census, RegularGraphCostsExactlyDegreePerSample) {
    const auto g = ring_lattice(100, 8);
    ExperimentConfig c;
    c.trials = 3;
    c.sample_sizes = {2000};
    const auto rows = query_census(g, c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].mode, PublicDegreeMode::ExactHidden);
    EXPECT_DOUBLE_EQ(rows[0].mean_raw_queries, 2000.0 * 8);
    EXPECT_DOUBLE_EQ(rows[0].mean_query_ratio, 8.0);
    EXPECT_DOUBLE_EQ(rows[1].mean_query_ratio, 1.0);
    EXPECT_DOUBLE_EQ(rows[0].unique_fraction, 1.0);
    EXPECT_LE(rows[1].unique_fraction, rows[0].unique_fraction);
}

TEST(Experiment, FileLabelsFixTheGrid) {
    const auto g = example_graph().all_public();
    const auto dir = std::filesystem::temp_directory_path() / "privwalk_experiment_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "labels.txt").string();
    {
        std::ofstream out(path);
        write_labels(out, example_graph());
    }
    ExperimentConfig c;
    c.labels_path = path;
    c.trials = 5;
    c.sample_sizes = {100};
    const auto result = run_experiment(g, c);
    ASSERT_EQ(result.theory.size(), 1u);
    EXPECT_DOUBLE_EQ(result.theory[0].p, 0.2);
    EXPECT_DOUBLE_EQ(row(result, 0.2, "nc_size_cv").nrmse, 0.5); // n* = 5 of 10

    write_experiment(result, (dir / "out").string());
    std::ifstream in(dir / "out" / "nrmse.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "p,sample_size,estimator,nrmse,failed_trials,mean_query_ratio");
    std::filesystem::remove_all(dir);
}

TEST(Census, ApproximationQueriesFarFewerNodesOnDenseGraphs) {
    const auto g = preferential_attachment(5000, 20, 9);
    ExperimentConfig c;
    c.p_grid = {0.2};
    c.trials = 5;
    c.sample_fractions = {0.01};
    const auto rows = query_census(g, c);
    ASSERT_EQ(rows.size(), 2u);
    const auto& exact = rows[0];
    const auto& approx = rows[1];
    EXPECT_EQ(approx.mode, PublicDegreeMode::ApproxHidden);
    EXPECT_LT(approx.unique_fraction, 0.02);
    EXPECT_GT(exact.unique_fraction, 10 * approx.unique_fraction);
    EXPECT_GT(exact.mean_raw_queries, 10 * approx.mean_raw_queries);
}
