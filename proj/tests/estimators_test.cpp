#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "privwalk/estimators.hpp"
#include "privwalk/theory.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace privwalk;
using namespace privwalk::testing;

namespace {

/// Random record over `nodes` distinct nodes, each with a fixed degree and
/// a public-degree in [1, degree].
std::vector<Sample> random_record(std::size_t r, std::size_t nodes, std::mt19937_64& rng, bool all_public = false) {
    std::uniform_int_distribution<int> deg(1, 30);
    std::vector<Sample> table(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        table[i].node = 1000 + i * 7;
        table[i].degree = static_cast<std::uint64_t>(deg(rng));
        std::uniform_int_distribution<std::uint64_t> pub(1, table[i].degree);
        table[i].public_degree = all_public ? static_cast<double>(table[i].degree) : static_cast<double>(pub(rng));
    }
    std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
    std::vector<Sample> out(r);
    for (auto& s : out) {
        s = table[pick(rng)];
    }
    return out;
}

} // namespace

TEST(SizeEstimates, HandComputedRecord) {
    // pairs at gap >= 2 in a 4-sample record: (1,3) (1,4) (2,4) in both orders
    const std::vector<Sample> s{{1, 2, 1.0}, {2, 3, 2.0}, {1, 2, 1.0}, {3, 4, 4.0}};
    const auto e = size_estimates(s, 2);
    EXPECT_EQ(e.pair_count, 6u);
    EXPECT_EQ(e.collisions, 2u);
    EXPECT_DOUBLE_EQ(e.collision_mean, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(e.weight_mean_prior, 8.75 / 6.0);
    EXPECT_DOUBLE_EQ(e.weight_mean_proposed, 11.25 / 6.0);
    EXPECT_DOUBLE_EQ(e.n_nc, 4.375);
    EXPECT_DOUBLE_EQ(e.n_hat, 5.625);

    const auto d = avg_degree_estimates(s);
    EXPECT_DOUBLE_EQ(d.davg_smooth, 4.0 / 2.75);
    EXPECT_DOUBLE_EQ(d.davg_hat, 4.0 / (0.5 + 1.0 / 3.0 + 0.5 + 0.25));

    const auto p = estimate_privacy_rate(e, d);
    EXPECT_DOUBLE_EQ(p.p_hat_n, 1.0 - 4.375 / 5.625);
}

TEST(SizeEstimates, SingleNodeSaturates) {
    const std::vector<Sample> s(50, Sample{7, 4, 4.0});
    const auto e = size_estimates(s, 5);
    EXPECT_DOUBLE_EQ(e.collision_mean, 1.0);
    EXPECT_DOUBLE_EQ(e.weight_mean_prior, 1.0);
    EXPECT_DOUBLE_EQ(e.weight_mean_proposed, 1.0);
    EXPECT_DOUBLE_EQ(e.n_nc, 1.0);
    EXPECT_DOUBLE_EQ(e.n_hat, 1.0);
    const auto d = avg_degree_estimates(s);
    EXPECT_DOUBLE_EQ(d.davg_smooth, 4.0);
    EXPECT_DOUBLE_EQ(d.davg_hat, 4.0);
}

TEST(SizeEstimates, NoCollisionIsAnError) {
    std::vector<Sample> s;
    for (std::uint64_t i = 0; i < 20; ++i) {
        s.push_back({i, 3, 2.0});
    }
    EXPECT_THROW(size_estimates(s, 2), NoCollisionError);
}

TEST(SizeEstimates, BadGapOrZeroDenominator) {
    const std::vector<Sample> s(10, Sample{1, 3, 2.0});
    EXPECT_THROW(size_estimates(s, 0), EstimationError);
    EXPECT_THROW(size_estimates(s, 10), EstimationError);
    auto zero = s;
    zero[4].public_degree = 0.0;
    EXPECT_THROW(size_estimates(zero, 2), EstimationError);
    EXPECT_THROW(avg_degree_estimates(zero), EstimationError);
    // sample 3 of 5 never appears as a denominator at m = 3
    std::vector<Sample> middle(5, Sample{1, 3, 2.0});
    middle[2].public_degree = 0.0;
    EXPECT_NO_THROW(size_estimates(middle, 3));
}

TEST(SizeEstimates, AllPublicRecordGivesEqualEstimates) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_record(300, 12, rng, true);
        const auto report = estimate_all(s, 5);
        EXPECT_EQ(report.size.n_nc, report.size.n_hat);
        EXPECT_EQ(report.degree.davg_smooth, report.degree.davg_hat);
        EXPECT_EQ(report.privacy.p_hat_n, 0.0);
        EXPECT_EQ(report.privacy.p_hat_avg, 0.0);
    }
}

TEST(SizeEstimates, MatchesNaiveDoubleLoop) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> len(2, 500);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t r = trial == 0 ? 200 : len(rng);
        const auto s = random_record(r, 12, rng);
        std::uniform_int_distribution<std::size_t> gap(1, r - 1);
        const std::size_t m = trial == 0 ? 5 : gap(rng);
        const auto oracle = naive_size_estimates(s, m);
        if (oracle.phi == 0.0) {
            EXPECT_THROW(size_estimates(s, m), NoCollisionError);
            continue;
        }
        const auto fast = size_estimates(s, m);
        EXPECT_EQ(fast.pair_count, oracle.pairs);
        EXPECT_NEAR(fast.collision_mean, oracle.phi, 1e-12 * oracle.phi);
        EXPECT_NEAR(fast.weight_mean_prior, oracle.psi_prior, 1e-9 * oracle.psi_prior);
        EXPECT_NEAR(fast.weight_mean_proposed, oracle.psi_proposed, 1e-9 * oracle.psi_proposed);
        EXPECT_NEAR(fast.n_nc, oracle.n_nc, 1e-9 * oracle.n_nc);
        EXPECT_NEAR(fast.n_hat, oracle.n_hat, 1e-9 * oracle.n_hat);
    }
}

TEST(SizeEstimates, OrderedAndSymmetrizedWeightsAgree) {
    std::mt19937_64 rng(23);
    const auto s = random_record(400, 12, rng);
    const std::size_t m = 10;
    double sym = 0.0;
    std::uint64_t unordered = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        for (std::size_t l = k + m; l < s.size(); ++l) {
            const double a = s[k].public_degree;
            const double b = s[l].public_degree;
            sym += 0.5 * (a / b + b / a);
            ++unordered;
        }
    }
    const auto e = size_estimates(s, m);
    EXPECT_NEAR(e.weight_mean_prior, sym / static_cast<double>(unordered), 1e-12 * e.weight_mean_prior);
}

TEST(SizeEstimates, ScaleInvariance) {
    std::mt19937_64 rng(29);
    const auto s = random_record(300, 10, rng);
    auto scaled = s;
    for (auto& x : scaled) {
        x.degree *= 3;
        x.public_degree *= 3.0;
    }
    const auto a = estimate_all(s, 4);
    const auto b = estimate_all(scaled, 4);
    EXPECT_NEAR(a.size.n_nc, b.size.n_nc, 1e-12 * a.size.n_nc);
    EXPECT_NEAR(a.size.n_hat, b.size.n_hat, 1e-12 * a.size.n_hat);
    EXPECT_NEAR(a.privacy.p_hat_n, b.privacy.p_hat_n, 1e-12);
    EXPECT_NEAR(a.privacy.p_hat_avg, b.privacy.p_hat_avg, 1e-12);
    EXPECT_NEAR(3 * a.degree.davg_smooth, b.degree.davg_smooth, 1e-12 * b.degree.davg_smooth);
}

TEST(DefaultGap, TwoAndAHalfPercentRoundedUp) {
    EXPECT_EQ(default_collision_gap(1016275), 25407u);
    EXPECT_EQ(default_collision_gap(1000), 25u);
    EXPECT_EQ(default_collision_gap(100), 3u);
    EXPECT_EQ(default_collision_gap(10), 1u);
    EXPECT_EQ(ordered_pair_count(4, 2), 6u);
}

TEST(Estimators, AverageDegreeConvergesToClosedForms) {
    const auto g = assign_labels_bernoulli(random_connected_graph(50, 100, 31), 0.2, 32);
    const auto view = largest_public_cluster(g);
    const auto rec = run_walk(g, view, view.members()[0], 1000000, {PublicDegreeMode::ExactIdeal}, 33);
    const auto cv = convergence_values(g, view);
    const auto d = avg_degree_estimates(rec);
    EXPECT_NEAR(d.davg_smooth / cv.davg_star, 1.0, 0.02);
    EXPECT_NEAR(d.davg_hat / cv.davg_tilde, 1.0, 0.02);
}

TEST(Estimators, PrivacyRateRecoversPlantedP) {
    const auto base = preferential_attachment(10000, 8, 41);
    const double p = 0.25;
    const std::size_t r = 500;
    std::vector<double> estimates;
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = assign_labels_bernoulli(base, p, 5000 + trial);
        const auto view = largest_public_cluster(g);
        std::mt19937_64 rng(9000 + trial);
        std::uniform_int_distribution<std::size_t> pick(0, view.member_count() - 1);
        const auto rec = run_walk(g, view, view.members()[pick(rng)], r, {PublicDegreeMode::ExactIdeal}, 7000 + trial);
        try {
            estimates.push_back(estimate_all(rec, default_collision_gap(r)).privacy.p_hat_n);
        } catch (const NoCollisionError&) {
        }
    }
    ASSERT_GT(estimates.size(), 150u);
    std::nth_element(estimates.begin(), estimates.begin() + estimates.size() / 2, estimates.end());
    EXPECT_NEAR(estimates[estimates.size() / 2], p, 0.05);
}
