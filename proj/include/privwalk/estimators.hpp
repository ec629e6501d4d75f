#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "privwalk/errors.hpp"
#include "privwalk/numeric.hpp"
#include "privwalk/walker.hpp"

namespace privwalk {

/// Collision-based size estimates over ordered sample pairs (k, l) with
/// |k - l| >= m.
struct SizeEstimates {
    double collision_mean = 0.0;       // Phi
    double weight_mean_prior = 0.0;    // Psi, weight d*_k / d*_l
    double weight_mean_proposed = 0.0; // Psi-hat, weight d_k / d*_l
    double n_nc = 0.0;
    double n_hat = 0.0;
    std::uint64_t pair_count = 0;      // |I|
    std::uint64_t collisions = 0;      // ordered colliding pairs
};

struct AverageDegreeEstimates {
    double davg_smooth = 0.0;
    double davg_hat = 0.0;
};

struct PrivacyRateEstimates {
    double p_hat_n = 0.0;
    double p_hat_avg = 0.0;
};

struct EstimateReport {
    SizeEstimates size;
    AverageDegreeEstimates degree;
    PrivacyRateEstimates privacy;
    std::size_t m = 0;
    std::size_t r = 0;
};

/// Default collision gap: 2.5% of the sample size, rounded up.
inline std::size_t default_collision_gap(std::size_t r, double fraction = 0.025) {
    const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(r) - 1e-9));
    return std::max<std::size_t>(m, 1);
}

/// Number of ordered pairs in 1..r at distance >= m.
constexpr std::uint64_t ordered_pair_count(std::uint64_t r, std::uint64_t m) noexcept {
    return m >= r ? 0 : (r - m) * (r - m + 1);
}

/// Ordered pairs (k, l) with x_k == x_l and |k - l| >= m.
inline std::uint64_t count_collisions(std::span<const Sample> samples, std::size_t m) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        keyed[k] = {samples[k].node, k};
    }
    std::sort(keyed.begin(), keyed.end());
    std::uint64_t unordered = 0;
    std::size_t group = 0;
    while (group < keyed.size()) {
        std::size_t end = group;
        while (end < keyed.size() && keyed[end].first == keyed[group].first) {
            ++end;
        }
        // positions ascending within the group; count i < j with pos_j - pos_i >= m
        std::size_t lagging = group;
        for (std::size_t j = group; j < end; ++j) {
            while (lagging < j && keyed[j].second - keyed[lagging].second >= m) {
                ++lagging;
            }
            unordered += lagging - group;
        }
        group = end;
    }
    return 2 * unordered;
}

/// Phi, Psi, Psi-hat and both size estimates in O(r log r).
///
/// Psi-type sums factor as sum_k f_k * (sum of g_l over l <= k - m or
/// l >= k + m), so a prefix sum of g = 1 / public_degree covers both weights.
inline SizeEstimates size_estimates(std::span<const Sample> samples, std::size_t m) {
    const std::size_t r = samples.size();
    if (m == 0 || m >= r) {
        throw EstimationError("collision gap m = " + std::to_string(m) + " must satisfy 1 <= m < r = " +
                              std::to_string(r));
    }
    // prefix[i] = sum of g over the first i samples
    std::vector<long double> prefix(r + 1, 0.0L);
    for (std::size_t l = 0; l < r; ++l) {
        const bool is_denominator = l >= m || l + m < r;
        const double pd = samples[l].public_degree;
        if (is_denominator && !(pd > 0.0)) {
            throw EstimationError("sample " + std::to_string(l + 1) + " has zero public-degree");
        }
        prefix[l + 1] = prefix[l] + (pd > 0.0 ? 1.0L / static_cast<long double>(pd) : 0.0L);
    }
    const long double total = prefix[r];
    long double prior = 0.0L;
    long double proposed = 0.0L;
    for (std::size_t k = 0; k < r; ++k) {
        long double band = 0.0L;
        if (k >= m) {
            band += prefix[k - m + 1];
        }
        if (k + m < r) {
            band += total - prefix[k + m];
        }
        prior += static_cast<long double>(samples[k].public_degree) * band;
        proposed += static_cast<long double>(samples[k].degree) * band;
    }

    SizeEstimates out;
    out.pair_count = ordered_pair_count(r, m);
    out.collisions = count_collisions(samples, m);
    const auto pairs = static_cast<long double>(out.pair_count);
    out.collision_mean = static_cast<double>(static_cast<long double>(out.collisions) / pairs);
    out.weight_mean_prior = static_cast<double>(prior / pairs);
    out.weight_mean_proposed = static_cast<double>(proposed / pairs);
    if (out.collisions == 0) {
        throw NoCollisionError("no sample pair at gap >= " + std::to_string(m) + " collided");
    }
    out.n_nc = static_cast<double>(prior / static_cast<long double>(out.collisions));
    out.n_hat = static_cast<double>(proposed / static_cast<long double>(out.collisions));
    return out;
}

inline SizeEstimates size_estimates(const WalkRecord& record, std::size_t m) {
    return size_estimates(std::span<const Sample>(record.samples), m);
}

/// Harmonic-mean estimators with smoothing constant 0.
inline AverageDegreeEstimates avg_degree_estimates(std::span<const Sample> samples) {
    if (samples.empty()) {
        throw EstimationError("empty sample");
    }
    CompensatedSum inv_public;
    CompensatedSum inv_degree;
    for (const auto& s : samples) {
        if (!(s.public_degree > 0.0) || s.degree == 0) {
            throw EstimationError("sample with zero degree or public-degree");
        }
        inv_public += 1.0 / s.public_degree;
        inv_degree += 1.0 / static_cast<double>(s.degree);
    }
    const auto r = static_cast<double>(samples.size());
    return {r / inv_public.value(), r / inv_degree.value()};
}

inline AverageDegreeEstimates avg_degree_estimates(const WalkRecord& record) {
    return avg_degree_estimates(std::span<const Sample>(record.samples));
}

/// Unclamped; sampling noise can push either value slightly below zero.
inline PrivacyRateEstimates estimate_privacy_rate(const SizeEstimates& size, const AverageDegreeEstimates& degree) {
    return {1.0 - size.n_nc / size.n_hat, 1.0 - degree.davg_smooth / degree.davg_hat};
}

inline EstimateReport estimate_all(std::span<const Sample> samples, std::size_t m) {
    EstimateReport report;
    report.m = m;
    report.r = samples.size();
    report.size = size_estimates(samples, m);
    report.degree = avg_degree_estimates(samples);
    report.privacy = estimate_privacy_rate(report.size, report.degree);
    return report;
}

inline EstimateReport estimate_all(const WalkRecord& record, std::size_t m) {
    return estimate_all(std::span<const Sample>(record.samples), m);
}

} // namespace privwalk
