#include "rcg/evaluation.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rcg/random.hpp"

namespace rcg {

namespace {

constexpr std::array kAlgorithms{Algorithm::none, Algorithm::fsrcg, Algorithm::psrcg,      Algorithm::fsps,
                                 Algorithm::cnn,  Algorithm::rnn,   Algorithm::fsrcg_psrcg};

}  // namespace

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::none: return "none";
        case Algorithm::fsrcg: return "fsrcg";
        case Algorithm::psrcg: return "psrcg";
        case Algorithm::fsps: return "fsps";
        case Algorithm::cnn: return "cnn";
        case Algorithm::rnn: return "rnn";
        case Algorithm::fsrcg_psrcg: return "fsrcg+psrcg";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : kAlgorithms)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

std::span<const Algorithm> all_algorithms() { return kAlgorithms; }

ReductionResult reduce(const Dataset& ds, const InstanceMask& train, Algorithm algorithm, const AlgorithmConfig& cfg) {
    const auto all_features = FeatureMask::all(ds.cols());
    auto baseline = [&](InstanceMask kept, std::string name) {
        ReductionResult r{all_features, std::move(kept), {}};
        r.trace.algorithm = std::move(name);
        r.trace.halt_reason = "consistent subset";
        return r;
    };
    switch (algorithm) {
        case Algorithm::none: {
            ReductionResult r{all_features, train, {}};
            r.trace.algorithm = "none";
            r.trace.halt_reason = "no reduction";
            return r;
        }
        case Algorithm::fsrcg: return fsrcg(ds, train, cfg);
        case Algorithm::psrcg: return psrcg(ds, train, all_features, cfg);
        case Algorithm::fsps: return fsps_rcg(ds, train, cfg);
        case Algorithm::cnn: return baseline(cnn_baseline(ds, train, all_features, cfg.normalize), "cnn");
        case Algorithm::rnn: return baseline(rnn_baseline(ds, train, all_features, cfg.normalize), "rnn");
        case Algorithm::fsrcg_psrcg: return fsrcg_then_psrcg(ds, train, cfg);
    }
    throw std::invalid_argument("unknown algorithm");
}

namespace {

int vote(const Dataset& ds, const InstanceMask& prototypes, int k, auto&& dist_to) {
    if (prototypes.count() == 0) throw std::invalid_argument("kNN classification over an empty prototype set");
    if (k < 1) throw std::invalid_argument("kNN classification needs k >= 1");

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(prototypes.count());
    for (std::size_t r : prototypes.indices()) ranked.emplace_back(dist_to(r), r);
    const auto take = std::min(static_cast<std::size_t>(k), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());

    std::vector<std::size_t> votes(static_cast<std::size_t>(ds.classes()), 0);
    for (std::size_t i = 0; i < take; ++i) ++votes[static_cast<std::size_t>(ds.label(ranked[i].second))];
    const auto top = *std::max_element(votes.begin(), votes.end());
    for (std::size_t i = 0; i < take; ++i) {
        const int y = ds.label(ranked[i].second);
        if (votes[static_cast<std::size_t>(y)] == top) return y;
    }
    return ds.label(ranked.front().second);
}

}  // namespace

int knn_classify(const Dataset& ds, const InstanceMask& prototypes, const FeatureMask& fmask, const DistanceSpec& spec,
                 std::size_t query_row, int k) {
    return knn_classify(ds, prototypes, fmask, spec, ds.row(query_row), k);
}

int knn_classify(const Dataset& ds, const InstanceMask& prototypes, const FeatureMask& fmask, const DistanceSpec& spec,
                 std::span<const double> query, int k) {
    if (fmask.count() == 0) throw std::invalid_argument("kNN classification over an empty feature mask");
    return vote(ds, prototypes, k, [&](std::size_t r) { return distance(ds, query, r, fmask, spec); });
}

EvalResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    const auto folds = split(ds, cfg.scheme);

    EvalResult out;
    out.algorithm = std::string(to_string(cfg.algorithm));
    out.split_signature = describe(cfg.scheme);
    out.total_features = ds.cols();

    double inst_sum = 0.0;
    double feat_sum = 0.0;
    double acc_sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& [train, test] = folds[f];
        FoldRecord rec;
        rec.fold = f;
        rec.train_size = train.count();
        rec.test_size = test.count();

        std::optional<Dataset> noisy;
        if (cfg.noise) {
            const NoiseSpec fold_noise{cfg.noise->fraction,
                                       substream_seed(cfg.noise->seed, "fold-" + std::to_string(f))};
            noisy = inject_label_noise(ds, fold_noise, train);
            for (std::size_t r : train.indices()) rec.noisy_labels += noisy->label(r) != ds.label(r);
        }
        const Dataset& train_view = noisy ? *noisy : ds;

        const auto reduced = reduce(train_view, train, cfg.algorithm, cfg.reduction);
        const auto spec = DistanceSpec::fit(ds, train, cfg.reduction.normalize);
        for (std::size_t r : test.indices()) {
            const int predicted =
                knn_classify(train_view, reduced.instances, reduced.features, spec, ds.row(r), cfg.classify_k);
            rec.correct += predicted == ds.label(r);
        }
        rec.retained_instances = reduced.instances.count();
        rec.retained_features = reduced.features.count();
        rec.selected_features = reduced.features.indices();
        rec.graph_builds = reduced.trace.graph_builds;
        rec.accuracy = 100.0 * static_cast<double>(rec.correct) / static_cast<double>(rec.test_size);

        inst_sum += 100.0 * static_cast<double>(rec.retained_instances) / static_cast<double>(rec.train_size);
        feat_sum += 100.0 * static_cast<double>(rec.retained_features) / static_cast<double>(ds.cols());
        acc_sum += rec.accuracy;
        out.graph_builds += rec.graph_builds;
        out.per_fold.push_back(std::move(rec));
    }

    const auto n = static_cast<double>(folds.size());
    out.accuracy = acc_sum / n;
    out.retained_instances_pct = inst_sum / n;
    out.retained_features_pct = feat_sum / n;
    out.size_times_dim_pct = out.retained_instances_pct * out.retained_features_pct / 100.0;
    out.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return out;
}

PairedT paired_t_test(std::span<const double> first, std::span<const double> second) {
    if (first.size() != second.size()) throw std::invalid_argument("paired t-test needs equal-length samples");
    const std::size_t m = first.size();
    PairedT out;
    if (m < 2) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return PairedT{nan, nan, m == 1 ? first[0] - second[0] : nan, nan, nan};
    }
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = first[i] - second[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(m);
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    out.df = static_cast<double>(m - 1);
    out.mean_difference = mean;

    if (sd == 0.0) {
        if (mean == 0.0) return out;
        out.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        out.p_two_sided = 0.0;
        out.p_one_sided = mean > 0 ? 0.0 : 1.0;
        return out;
    }
    out.t = mean / (sd / std::sqrt(static_cast<double>(m)));
    const boost::math::students_t dist(out.df);
    out.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
    out.p_one_sided = boost::math::cdf(boost::math::complement(dist, out.t));
    return out;
}

ComparisonTable compare_table(std::span<const EvalResult> results) {
    ComparisonTable table;
    if (results.empty()) return table;
    table.split_signature = results.front().split_signature;
    for (const auto& r : results) {
        if (r.split_signature != table.split_signature || r.per_fold.size() != results.front().per_fold.size())
            throw std::invalid_argument("results come from mismatched splits: '" + r.split_signature + "' vs '" +
                                        table.split_signature + "'");
        table.rows.push_back({r.algorithm, r.retained_instances_pct, r.retained_features_pct, r.size_times_dim_pct,
                              r.accuracy});
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const auto& a, const auto& b) { return a.size_times_dim_pct < b.size_times_dim_pct; });

    auto accuracies = [](const EvalResult& r) {
        std::vector<double> v;
        for (const auto& f : r.per_fold) v.push_back(f.accuracy);
        return v;
    };
    for (std::size_t i = 0; i < results.size(); ++i)
        for (std::size_t j = i + 1; j < results.size(); ++j)
            table.tests.push_back({results[i].algorithm, results[j].algorithm,
                                   paired_t_test(accuracies(results[i]), accuracies(results[j]))});
    return table;
}

namespace {

std::string fixed(double v, int precision = 2) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string padded(const std::string& s, std::size_t width, bool left) {
    if (s.size() >= width) return s;
    const std::string pad(width - s.size(), ' ');
    return left ? s + pad : pad + s;
}

void print_header(std::ostream& out) {
    out << padded("algorithm", 14, true) << padded("Size%", 9, false) << padded("Dim%", 9, false)
        << padded("SizexDim%", 11, false) << padded("Accuracy", 10, false) << '\n';
}

void print_row(std::ostream& out, const std::string& name, double size, double dim, double sxd, double acc) {
    out << padded(name, 14, true) << padded(fixed(size), 9, false) << padded(fixed(dim), 9, false)
        << padded(fixed(sxd), 11, false) << padded(fixed(acc), 10, false) << '\n';
}

}  // namespace

void print_summary_row(std::ostream& out, const EvalResult& r) {
    print_header(out);
    print_row(out, r.algorithm, r.retained_instances_pct, r.retained_features_pct, r.size_times_dim_pct, r.accuracy);
}

void print_table(std::ostream& out, const ComparisonTable& table) {
    out << "split: " << table.split_signature << '\n';
    print_header(out);
    for (const auto& r : table.rows) print_row(out, r.algorithm, r.size_pct, r.dim_pct, r.size_times_dim_pct, r.accuracy);
    if (table.tests.empty()) return;
    out << "\npaired t-tests on per-fold accuracy (first - second)\n";
    for (const auto& t : table.tests) {
        out << "  " << padded(t.first + " vs " + t.second, 28, true);
        if (std::isnan(t.test.t)) {
            out << "n/a (fewer than two folds)\n";
            continue;
        }
        out << "t=" << padded(fixed(t.test.t, 4), 9, false) << "  df=" << fixed(t.test.df, 0)
            << "  p2=" << fixed(t.test.p_two_sided, 4) << "  p1=" << fixed(t.test.p_one_sided, 4) << '\n';
    }
}

}  // namespace rcg
