#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "privwalk/graph.hpp"
#include "privwalk/numeric.hpp"

namespace privwalk {

/// Almost-sure limits of the four estimators for a fixed labeling.
struct ConvergenceValues {
    double n_star = 0.0;     // NC size estimator -> |C*|
    double n_tilde = 0.0;    // proposed size estimator
    double davg_star = 0.0;  // Smooth estimator -> D* / n*
    double davg_tilde = 0.0; // proposed average-degree estimator
};

inline ConvergenceValues convergence_values(const LabeledGraph& g, const PublicClusterView& view) {
    std::uint64_t cross = 0;   // sum d*_i d_i
    std::uint64_t squares = 0; // sum (d*_i)^2
    CompensatedSum ratio;      // sum d*_i / d_i
    for (NodeId v : view.members()) {
        const std::uint64_t pd = view.public_degree(v);
        const std::uint64_t d = g.degree(v);
        cross += pd * d;
        squares += pd * pd;
        ratio += static_cast<double>(pd) / static_cast<double>(d);
    }
    ConvergenceValues cv;
    cv.n_star = static_cast<double>(view.member_count());
    const auto dsum = static_cast<double>(view.public_degree_sum());
    cv.n_tilde = squares == 0 ? 0.0 : cv.n_star * static_cast<double>(cross) / static_cast<double>(squares);
    cv.davg_star = dsum / cv.n_star;
    cv.davg_tilde = ratio.value() > 0.0 ? dsum / ratio.value() : 0.0;
    return cv;
}

/// Degree statistics of the full graph that the label-averaged closed forms use.
struct DegreeMoments {
    std::size_t n = 0;
    std::uint64_t sum = 0;         // D
    std::uint64_t sum_squares = 0; // sum d_i^2

    static DegreeMoments of(const LabeledGraph& g) {
        DegreeMoments m;
        m.n = g.node_count();
        for (NodeId v = 0; v < m.n; ++v) {
            const std::uint64_t d = g.degree(v);
            m.sum += d;
            m.sum_squares += d * d;
        }
        return m;
    }
    double average() const noexcept { return static_cast<double>(sum) / static_cast<double>(n); }
};

/// Expectations over Bernoulli(p) label draws, assuming every public node
/// joins the largest public-cluster.
struct ExpectedErrors {
    double expected_n_star = 0.0;     // (1-p) n
    double alpha_p = 0.0;
    double expected_n_tilde = 0.0;    // alpha_p n
    double expected_davg_star = 0.0;  // (1-p) d_avg
    double expected_davg_tilde = 0.0; // d_avg
};

/// alpha_p = (1-p) sum d^2 / sum d[(1-p)d + p].
inline double alpha_coefficient(const DegreeMoments& m, double p) {
    const double q = 1.0 - p;
    const double num = q * static_cast<double>(m.sum_squares);
    const double den = q * static_cast<double>(m.sum_squares) + p * static_cast<double>(m.sum);
    return den == 0.0 ? 0.0 : num / den;
}

inline ExpectedErrors expected_errors(const DegreeMoments& m, double p) {
    ExpectedErrors e;
    const double n = static_cast<double>(m.n);
    e.expected_n_star = (1.0 - p) * n;
    e.alpha_p = alpha_coefficient(m, p);
    e.expected_n_tilde = e.alpha_p * n;
    e.expected_davg_star = (1.0 - p) * m.average();
    e.expected_davg_tilde = m.average();
    return e;
}

inline ExpectedErrors expected_errors(const LabeledGraph& g, double p) {
    return expected_errors(DegreeMoments::of(g), p);
}

/// Expected queries per sample for the exact public-degree method (probe
/// every neighbor) and for the selection-count approximation.
struct QueryRatios {
    double exact = 0.0;   // sum_{C*} d*_i d_i / D*
    double approx = 0.0;  // sum_{C*} d_i / D*
    double savings = 0.0; // exact / approx
};

inline QueryRatios expected_query_ratios(const PublicClusterView& view, const LabeledGraph& g) {
    std::uint64_t cross = 0;
    std::uint64_t degrees = 0;
    for (NodeId v : view.members()) {
        cross += static_cast<std::uint64_t>(view.public_degree(v)) * g.degree(v);
        degrees += g.degree(v);
    }
    const auto dsum = static_cast<double>(view.public_degree_sum());
    QueryRatios q;
    q.exact = static_cast<double>(cross) / dsum;
    q.approx = static_cast<double>(degrees) / dsum;
    q.savings = q.exact / q.approx;
    return q;
}

/// First and second moments of a Binomial(d, 1-p) public-degree.
struct PublicDegreeMoments {
    double mean = 0.0;
    double second = 0.0;
};

inline PublicDegreeMoments expectation_lemma_moments(std::uint64_t d, double p) {
    const double q = 1.0 - p;
    const double dd = static_cast<double>(d);
    return {q * dd, q * dd * (q * dd + p)};
}

struct CorollaryCheck {
    bool size_holds = false;
    bool avg_degree_holds = false;
    double size_proposed_gap = 0.0;  // |n - alpha_p n|
    double size_prior_gap = 0.0;     // |n - (1-p) n|
    double degree_proposed_gap = 0.0;
    double degree_prior_gap = 0.0;
};

/// Compares the expected convergence errors of the proposed and prior
/// estimators. Expected sums are evaluated node by node and the degree
/// ratios use their p -> 1 limits when both expectations vanish. A relative
/// slack of 1e-12 absorbs rounding in the equality case p = 0.
inline CorollaryCheck corollary_inequalities(const LabeledGraph& g, double p) {
    const auto m = DegreeMoments::of(g);
    const double q = 1.0 - p;
    const double n = static_cast<double>(m.n);
    const double davg = m.average();

    CompensatedSum exp_dstar_sum;  // E[D*] = sum Pr[i in V*] E[d*_i]
    CompensatedSum exp_ratio_sum;  // E[sum d*_i / d_i]
    for (NodeId v = 0; v < m.n; ++v) {
        const auto d = static_cast<double>(g.degree(v));
        exp_dstar_sum += q * (q * d);
        exp_ratio_sum += q * (q * d) / d;
    }
    const double exp_n_star = q * n;

    CorollaryCheck c;
    const double alpha = alpha_coefficient(m, p);
    c.size_proposed_gap = std::fabs(n - alpha * n);
    c.size_prior_gap = std::fabs(n - exp_n_star);

    double proposed_avg = davg;
    double prior_avg = 0.0;
    if (exp_ratio_sum.value() > 0.0) {
        proposed_avg = exp_dstar_sum.value() / exp_ratio_sum.value();
    }
    if (exp_n_star > 0.0) {
        prior_avg = exp_dstar_sum.value() / exp_n_star;
    }
    c.degree_proposed_gap = std::fabs(davg - proposed_avg);
    c.degree_prior_gap = std::fabs(davg - prior_avg);

    constexpr double slack = 1e-12;
    c.size_holds = c.size_proposed_gap <= c.size_prior_gap + slack * n;
    c.avg_degree_holds = c.degree_proposed_gap <= c.degree_prior_gap + slack * davg;
    return c;
}

/// One row of the theory report.
struct TheoryRow {
    double p = 0.0;
    ExpectedErrors expected;
    double davg = 0.0;
    QueryRatios queries;
};

inline void write_theory_csv(std::ostream& out, std::span<const TheoryRow> rows) {
    const auto old_precision = out.precision(12);
    out << "p,expected_n_star,alpha_p_n,expected_davg_star,davg,expected_q,expected_q_hat\n";
    for (const auto& row : rows) {
        out << row.p << ',' << row.expected.expected_n_star << ',' << row.expected.expected_n_tilde << ','
            << row.expected.expected_davg_star << ',' << row.davg << ',' << row.queries.exact << ','
            << row.queries.approx << '\n';
    }
    out.precision(old_precision);
}

} // namespace privwalk
