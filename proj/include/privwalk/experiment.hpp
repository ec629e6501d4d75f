#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "privwalk/estimators.hpp"
#include "privwalk/graph.hpp"
#include "privwalk/ingest.hpp"
#include "privwalk/numeric.hpp"
#include "privwalk/theory.hpp"
#include "privwalk/walker.hpp"

namespace privwalk {

enum class Reference {
    Truth,       // compare estimates with the full-graph size and average degree
    Convergence, // compare each estimate with its own convergence value
};

struct ExperimentConfig {
    std::string dataset;
    bool directed = false;
    /// Label file; when empty labels are redrawn per trial from `p_grid`.
    std::string labels_path;
    bool strict_labels = false;
    std::vector<double> p_grid{0.0};
    PublicDegreeMode mode = PublicDegreeMode::ExactIdeal;
    bool memoize = false;
    VisitCharging charging = VisitCharging::ReuseProbe;
    /// Walk lengths as fractions of n; `sample_sizes` overrides when set.
    std::vector<double> sample_fractions{0.01};
    std::vector<std::size_t> sample_sizes;
    double m_fraction = 0.025;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    Reference reference = Reference::Truth;
    unsigned threads = 1;

    bool bernoulli_labels() const noexcept { return labels_path.empty(); }
    void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, std::string_view text) {
    double v = 0.0;
    if (!parse_number(text, v)) {
        throw Error("config: " + key + ": not a number: " + std::string(text));
    }
    return v;
}

inline std::uint64_t to_unsigned(const std::string& key, std::string_view text) {
    std::uint64_t v = 0;
    if (!parse_number(text, v)) {
        throw Error("config: " + key + ": not a non-negative integer: " + std::string(text));
    }
    return v;
}

inline bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw Error("config: " + key + ": expected true/false");
}

inline std::vector<std::string> tokenize_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

/// "a,b,c" or an inclusive range "start:step:stop".
inline std::vector<double> to_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = tokenize_on(text, ':');
        if (parts.size() != 3) {
            throw Error("config: " + key + ": range must be start:step:stop");
        }
        const double start = to_double(key, trim(parts[0]));
        const double step = to_double(key, trim(parts[1]));
        const double stop = to_double(key, trim(parts[2]));
        if (!(step > 0.0)) {
            throw Error("config: " + key + ": range step must be positive");
        }
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            // round to 12 digits so 0.03 * 7 prints as 0.21
            out.push_back(std::round((start + step * static_cast<double>(i)) * 1e12) / 1e12);
        }
        return out;
    }
    for (const auto& part : tokenize_on(text, ',')) {
        out.push_back(to_double(key, trim(part)));
    }
    return out;
}

} // namespace detail

inline const char* to_string(PublicDegreeMode mode) {
    switch (mode) {
    case PublicDegreeMode::ExactIdeal:
        return "exact_ideal";
    case PublicDegreeMode::ExactHidden:
        return "exact_hidden";
    case PublicDegreeMode::ApproxHidden:
        return "approx_hidden";
    }
    return "?";
}

inline PublicDegreeMode parse_public_degree_mode(const std::string& text) {
    if (text == "exact_ideal") {
        return PublicDegreeMode::ExactIdeal;
    }
    if (text == "exact_hidden") {
        return PublicDegreeMode::ExactHidden;
    }
    if (text == "approx_hidden") {
        return PublicDegreeMode::ApproxHidden;
    }
    throw Error("unknown public-degree mode '" + text + "' (exact_ideal, exact_hidden, approx_hidden)");
}

inline void ExperimentConfig::validate() const {
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error("config: p_grid values must lie in [0, 1]");
        }
    }
    if (sample_sizes.empty()) {
        if (sample_fractions.empty()) {
            throw Error("config: need sample_fractions or sample_sizes");
        }
        for (double f : sample_fractions) {
            if (!(f > 0.0 && f <= 1.0)) {
                throw Error("config: sample_fractions values must lie in (0, 1]");
            }
        }
    }
    if (!(m_fraction > 0.0 && m_fraction < 1.0)) {
        throw Error("config: m_fraction must lie in (0, 1)");
    }
    if (trials == 0) {
        throw Error("config: trials must be at least 1");
    }
}

/// Reads "key = value" lines; '#' starts a comment. See configs/ for an example.
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
    ExperimentConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, line_no, "expected key = value");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key == "dataset") {
            c.dataset = value;
        } else if (key == "directed") {
            c.directed = detail::to_bool(key, value);
        } else if (key == "labels") {
            c.labels_path = value;
        } else if (key == "strict_labels") {
            c.strict_labels = detail::to_bool(key, value);
        } else if (key == "p_grid") {
            c.p_grid = detail::to_double_list(key, value);
        } else if (key == "pubdeg_mode") {
            c.mode = parse_public_degree_mode(value);
        } else if (key == "memoize") {
            c.memoize = detail::to_bool(key, value);
        } else if (key == "visit_charging") {
            if (value == "reuse_probe") {
                c.charging = VisitCharging::ReuseProbe;
            } else if (value == "separate") {
                c.charging = VisitCharging::Separate;
            } else {
                throw ParseError(source, line_no, "visit_charging must be reuse_probe or separate");
            }
        } else if (key == "sample_fractions") {
            c.sample_fractions = detail::to_double_list(key, value);
        } else if (key == "sample_sizes") {
            c.sample_sizes.clear();
            for (double v : detail::to_double_list(key, value)) {
                c.sample_sizes.push_back(static_cast<std::size_t>(v));
            }
        } else if (key == "m_fraction") {
            c.m_fraction = detail::to_double(key, value);
        } else if (key == "trials") {
            c.trials = detail::to_unsigned(key, value);
        } else if (key == "seed") {
            c.seed = detail::to_unsigned(key, value);
        } else if (key == "output_dir") {
            c.output_dir = value;
        } else if (key == "reference") {
            if (value == "truth") {
                c.reference = Reference::Truth;
            } else if (value == "convergence") {
                c.reference = Reference::Convergence;
            } else {
                throw ParseError(source, line_no, "reference must be truth or convergence");
            }
        } else if (key == "threads") {
            c.threads = static_cast<unsigned>(detail::to_unsigned(key, value));
        } else {
            throw ParseError(source, line_no, "unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_config(in, path);
}

/// Outcome of one independent trial: fresh labels (Bernoulli mode), a
/// uniformly chosen seed on C*, one walk and every estimate.
struct TrialResult {
    bool walk_ok = false;
    bool size_ok = false;
    bool degree_ok = false;
    double n_nc = 0.0;
    double n_hat = 0.0;
    double davg_smooth = 0.0;
    double davg_hat = 0.0;
    ConvergenceValues cv;
    double query_ratio = 0.0;     // raw queries / r
    std::uint64_t raw_queries = 0;
    std::uint64_t unique_queried = 0;
};

/// Seed streams of trial i. Trial i uses base seed + i; labels, seed node and
/// walk draw from splitmix-derived streams 1, 2 and 3 of that value.
struct TrialSeeds {
    std::uint64_t labels;
    std::uint64_t seed_node;
    std::uint64_t walk;

    static TrialSeeds of(std::uint64_t base, std::size_t trial) {
        const std::uint64_t s = base + trial;
        return {derive_seed(s, 1), derive_seed(s, 2), derive_seed(s, 3)};
    }
};

inline NodeId pick_seed_node(const PublicClusterView& view, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, view.member_count() - 1);
    return view.members()[pick(rng)];
}

inline TrialResult run_trial(const LabeledGraph& labeled, const PublicClusterView& view, std::size_t r,
                             std::size_t m, const WalkOptions& options, const TrialSeeds& seeds) {
    TrialResult t;
    t.cv = convergence_values(labeled, view);
    WalkRecord record;
    try {
        record = run_walk(labeled, view, pick_seed_node(view, seeds.seed_node), r, options, seeds.walk);
    } catch (const StuckWalkError&) {
        return t;
    }
    t.walk_ok = true;
    t.raw_queries = record.ledger.raw_queries();
    t.unique_queried = record.ledger.unique_queried();
    t.query_ratio = static_cast<double>(t.raw_queries) / static_cast<double>(r);
    try {
        const auto size = size_estimates(record, m);
        t.n_nc = size.n_nc;
        t.n_hat = size.n_hat;
        t.size_ok = true;
    } catch (const NoCollisionError&) {
    } catch (const EstimationError&) {
    }
    try {
        const auto deg = avg_degree_estimates(record);
        t.davg_smooth = deg.davg_smooth;
        t.davg_hat = deg.davg_hat;
        t.degree_ok = true;
    } catch (const EstimationError&) {
    }
    return t;
}

/// Runs `trials` independent trials of one (p, r) cell, in parallel when
/// threads > 1. Results are stored by trial index, so thread count does not
/// affect them.
template <typename TrialFn>
std::vector<TrialResult> run_trials(std::size_t trials, unsigned threads, TrialFn&& fn) {
    std::vector<TrialResult> results(trials);
    if (threads <= 1 || trials == 1) {
        for (std::size_t i = 0; i < trials; ++i) {
            results[i] = fn(i);
        }
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < trials; i = next++) {
                    results[i] = fn(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

struct NrmseRow {
    double p = 0.0;
    std::size_t sample_size = 0;
    std::string estimator;
    double nrmse = 0.0;
    std::size_t failed_trials = 0;
    double mean_query_ratio = 0.0;
};

struct PrivacyRateRow {
    double p = 0.0;
    std::size_t sample_size = 0;
    std::string estimator;
    double mean = 0.0;
    double median = 0.0;
    std::size_t failed_trials = 0;
};

/// sqrt(mean((estimate / truth - 1)^2)); NaN when nothing succeeded.
inline double nrmse(const std::vector<double>& estimates, const std::vector<double>& truths) {
    if (estimates.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    CompensatedSum sq;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double rel = estimates[i] / truths[i] - 1.0;
        sq += rel * rel;
    }
    return std::sqrt(sq.value() / static_cast<double>(estimates.size()));
}

inline double median_of(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

struct ExperimentResult {
    std::vector<NrmseRow> nrmse;
    std::vector<PrivacyRateRow> privacy;
    std::vector<TheoryRow> theory;
};

namespace detail {

inline std::vector<std::size_t> walk_lengths(const ExperimentConfig& c, std::size_t n) {
    if (!c.sample_sizes.empty()) {
        return c.sample_sizes;
    }
    std::vector<std::size_t> out;
    for (double f : c.sample_fractions) {
        out.push_back(std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(f * static_cast<double>(n)))));
    }
    return out;
}

/// Label source for one experiment: fixed file labels or per-trial draws.
class LabelSource {
public:
    LabelSource(const LabeledGraph& base, const ExperimentConfig& c) : base_(base) {
        if (!c.bernoulli_labels()) {
            fixed_ = load_labels(c.labels_path, base, LabelFileOptions{c.strict_labels, Label::Public});
            fixed_view_ = largest_public_cluster(*fixed_);
        }
    }

    std::vector<double> grid(const ExperimentConfig& c) const {
        if (fixed_) {
            return {static_cast<double>(fixed_->private_count()) / static_cast<double>(fixed_->node_count())};
        }
        return c.p_grid;
    }

    template <typename Fn>
    auto with_labels(double p, std::uint64_t label_seed, Fn&& fn) const {
        if (fixed_) {
            return fn(*fixed_, *fixed_view_);
        }
        const auto labeled = assign_labels_bernoulli(base_, p, label_seed);
        const auto view = largest_public_cluster(labeled);
        return fn(labeled, view);
    }

private:
    const LabeledGraph& base_;
    std::optional<LabeledGraph> fixed_;
    std::optional<PublicClusterView> fixed_view_;
};

inline void add_rows(ExperimentResult& out, double p, std::size_t r, const std::vector<TrialResult>& trials,
                     const LabeledGraph& g, Reference reference) {
    const double n = static_cast<double>(g.node_count());
    const double davg = g.average_degree();
    struct Column {
        const char* name;
        bool size;
        double TrialResult::*estimate;
        double ConvergenceValues::*limit;
        double truth;
    };
    const Column columns[] = {
        {"nc_size", true, &TrialResult::n_nc, &ConvergenceValues::n_star, n},
        {"proposed_size", true, &TrialResult::n_hat, &ConvergenceValues::n_tilde, n},
        {"smooth_avg_degree", false, &TrialResult::davg_smooth, &ConvergenceValues::davg_star, davg},
        {"proposed_avg_degree", false, &TrialResult::davg_hat, &ConvergenceValues::davg_tilde, davg},
    };

    CompensatedSum query_sum;
    std::size_t walked = 0;
    for (const auto& t : trials) {
        if (t.walk_ok) {
            query_sum += t.query_ratio;
            ++walked;
        }
    }
    const double mean_query = walked ? query_sum.value() / static_cast<double>(walked)
                                     : std::numeric_limits<double>::quiet_NaN();

    for (const auto& col : columns) {
        std::vector<double> est;
        std::vector<double> ref;
        for (const auto& t : trials) {
            if (t.walk_ok && (col.size ? t.size_ok : t.degree_ok)) {
                est.push_back(t.*col.estimate);
                ref.push_back(reference == Reference::Truth ? col.truth : t.cv.*col.limit);
            }
        }
        out.nrmse.push_back({p, r, col.name, nrmse(est, ref), trials.size() - est.size(), mean_query});
    }
    // convergence values themselves against the full-graph truth
    for (const auto& col : columns) {
        std::vector<double> est;
        std::vector<double> ref;
        for (const auto& t : trials) {
            est.push_back(t.cv.*col.limit);
            ref.push_back(col.truth);
        }
        out.nrmse.push_back({p, r, std::string(col.name) + "_cv", nrmse(est, ref), 0, mean_query});
    }

    std::vector<double> pn;
    std::vector<double> pavg;
    for (const auto& t : trials) {
        if (t.walk_ok && t.size_ok) {
            pn.push_back(1.0 - t.n_nc / t.n_hat);
        }
        if (t.walk_ok && t.degree_ok) {
            pavg.push_back(1.0 - t.davg_smooth / t.davg_hat);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        CompensatedSum s;
        for (double x : v) {
            s += x;
        }
        return s.value() / static_cast<double>(v.size());
    };
    out.privacy.push_back({p, r, "p_hat_n", mean(pn), median_of(pn), trials.size() - pn.size()});
    out.privacy.push_back({p, r, "p_hat_avg", mean(pavg), median_of(pavg), trials.size() - pavg.size()});
}

} // namespace detail

/// Repeated-trial experiment over every (p, walk length) cell.
inline ExperimentResult run_experiment(const LabeledGraph& graph, const ExperimentConfig& config) {
    config.validate();
    const detail::LabelSource labels(graph, config);
    const auto lengths = detail::walk_lengths(config, graph.node_count());
    const auto moments = DegreeMoments::of(graph);
    WalkOptions options{config.mode, config.memoize, config.charging};

    ExperimentResult out;
    for (double p : labels.grid(config)) {
        TheoryRow row;
        row.p = p;
        row.expected = expected_errors(moments, p);
        row.davg = moments.average();
        row.queries = labels.with_labels(p, TrialSeeds::of(config.seed, 0).labels,
                                         [&](const LabeledGraph& g, const PublicClusterView& view) {
                                             return expected_query_ratios(view, g);
                                         });
        out.theory.push_back(row);

        for (std::size_t r : lengths) {
            const std::size_t m = default_collision_gap(r, config.m_fraction);
            auto trials = run_trials(config.trials, config.threads, [&](std::size_t i) {
                const auto seeds = TrialSeeds::of(config.seed, i);
                return labels.with_labels(p, seeds.labels, [&](const LabeledGraph& g, const PublicClusterView& view) {
                    return run_trial(g, view, r, m, options, seeds);
                });
            });
            detail::add_rows(out, p, r, trials, graph, config.reference);
        }
    }
    return out;
}

struct CensusRow {
    double p = 0.0;
    std::size_t sample_size = 0;
    PublicDegreeMode mode = PublicDegreeMode::ExactHidden;
    double size_nrmse = 0.0; // proposed size estimator against n
    std::size_t failed_trials = 0;
    double unique_fraction = 0.0; // mean distinct queried nodes / n
    double mean_raw_queries = 0.0;
    double mean_query_ratio = 0.0;
};

/// Query cost of exact versus approximated public-degrees on identical
/// random streams (the two walks visit the same nodes).
inline std::vector<CensusRow> query_census(const LabeledGraph& graph, const ExperimentConfig& config) {
    config.validate();
    const detail::LabelSource labels(graph, config);
    const auto lengths = detail::walk_lengths(config, graph.node_count());
    const double n = static_cast<double>(graph.node_count());

    std::vector<CensusRow> rows;
    for (double p : labels.grid(config)) {
        for (std::size_t r : lengths) {
            const std::size_t m = default_collision_gap(r, config.m_fraction);
            for (auto mode : {PublicDegreeMode::ExactHidden, PublicDegreeMode::ApproxHidden}) {
                const WalkOptions options{mode, config.memoize, config.charging};
                auto trials = run_trials(config.trials, config.threads, [&](std::size_t i) {
                    const auto seeds = TrialSeeds::of(config.seed, i);
                    return labels.with_labels(p, seeds.labels,
                                              [&](const LabeledGraph& g, const PublicClusterView& view) {
                                                  return run_trial(g, view, r, m, options, seeds);
                                              });
                });
                CensusRow row{p, r, mode};
                std::vector<double> est;
                std::vector<double> ref;
                CompensatedSum unique;
                CompensatedSum raw;
                std::size_t walked = 0;
                for (const auto& t : trials) {
                    if (!t.walk_ok) {
                        continue;
                    }
                    ++walked;
                    unique += static_cast<double>(t.unique_queried) / n;
                    raw += static_cast<double>(t.raw_queries);
                    if (t.size_ok) {
                        est.push_back(t.n_hat);
                        ref.push_back(n);
                    }
                }
                row.size_nrmse = nrmse(est, ref);
                row.failed_trials = trials.size() - est.size();
                const double w = walked ? static_cast<double>(walked) : std::numeric_limits<double>::quiet_NaN();
                row.unique_fraction = unique.value() / w;
                row.mean_raw_queries = raw.value() / w;
                row.mean_query_ratio = row.mean_raw_queries / static_cast<double>(r);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline void write_nrmse_csv(std::ostream& out, const std::vector<NrmseRow>& rows) {
    const auto old_precision = out.precision(10);
    out << "p,sample_size,estimator,nrmse,failed_trials,mean_query_ratio\n";
    for (const auto& r : rows) {
        out << r.p << ',' << r.sample_size << ',' << r.estimator << ',' << r.nrmse << ',' << r.failed_trials << ','
            << r.mean_query_ratio << '\n';
    }
    out.precision(old_precision);
}

inline void write_privacy_csv(std::ostream& out, const std::vector<PrivacyRateRow>& rows) {
    const auto old_precision = out.precision(10);
    out << "p,sample_size,estimator,mean,median,failed_trials\n";
    for (const auto& r : rows) {
        out << r.p << ',' << r.sample_size << ',' << r.estimator << ',' << r.mean << ',' << r.median << ','
            << r.failed_trials << '\n';
    }
    out.precision(old_precision);
}

inline void write_census_csv(std::ostream& out, const std::vector<CensusRow>& rows) {
    const auto old_precision = out.precision(10);
    out << "p,sample_size,pubdeg_mode,size_nrmse,failed_trials,unique_fraction,mean_raw_queries,mean_query_ratio\n";
    for (const auto& r : rows) {
        out << r.p << ',' << r.sample_size << ',' << to_string(r.mode) << ',' << r.size_nrmse << ','
            << r.failed_trials << ',' << r.unique_fraction << ',' << r.mean_raw_queries << ','
            << r.mean_query_ratio << '\n';
    }
    out.precision(old_precision);
}

/// Writes nrmse.csv, privacy_rate.csv and theory.csv into the output directory.
inline void write_experiment(const ExperimentResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    std::ofstream nrmse_out(base / "nrmse.csv");
    write_nrmse_csv(nrmse_out, result.nrmse);
    std::ofstream privacy_out(base / "privacy_rate.csv");
    write_privacy_csv(privacy_out, result.privacy);
    std::ofstream theory_out(base / "theory.csv");
    write_theory_csv(theory_out, result.theory);
    if (!nrmse_out || !privacy_out || !theory_out) {
        throw Error("failed writing results to " + dir);
    }
}

} // namespace privwalk
