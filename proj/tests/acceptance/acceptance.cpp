// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracle.hpp"
#include "rcg/evaluation.hpp"
#include "rcg/knn_graph.hpp"
#include "rcg/reduction.hpp"
#include "rcg/uncertainty.hpp"
#include "synthetic.hpp"

#ifndef RCG_DATA_DIR
#define RCG_DATA_DIR "data"
#endif

namespace {

using namespace rcg;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<std::size_t> iota_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

// 1. Formula suite against the brute-force oracle.
Outcome formula_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    std::size_t graphs = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(6, 50)(rng);
        const int c = std::uniform_int_distribution<int>(2, 4)(rng);
        const int k = std::uniform_int_distribution<int>(1, 5)(rng);
        const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const Dataset ds = testing::random_small(n, p, c, rng);
        const auto all = InstanceMask::all(n);
        const auto cols = FeatureMask::all(p);
        const auto matrix = pairwise_matrix(ds, all, cols, DistanceSpec::fit(ds, all));
        const auto g = NeighborhoodGraph::build(matrix, ds.labels(), c, k);
        const auto state = compute_state(g);

        const auto d = oracle::distances(ds, iota_rows(n), iota_rows(p));
        const auto expected = oracle::uncertainty(oracle::knn_edges(d, k),
                                                  std::vector<int>(ds.labels().begin(), ds.labels().end()), c);
        if (state.n_dotdot != expected.n_dotdot) return {false, fmt("n.. mismatch on trial %d", trial)};
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(state.u_loc[i] - expected.u_loc[i]));
        worst = std::max({worst, std::fabs(state.u_tot - expected.u_tot), std::fabs(state.u0 - expected.u0),
                          std::fabs(state.rcg - expected.rcg),
                          std::fabs(prior_uncertainty(ds.labels(), c) - expected.u0)});

        std::vector<double> dist(static_cast<std::size_t>(c));
        double total = 0.0;
        for (auto& x : dist) total += (x = std::uniform_real_distribution<double>(0, 1)(rng));
        for (auto& x : dist) x /= total;
        worst = std::max(worst, std::fabs(quadratic_entropy(dist) - oracle::gini(dist)));
        ++graphs;
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 10.0, fmt("%zu graphs, max abs error %.2e, %.2f s", graphs, worst, secs)};
}

// 2. Incremental deletions against rebuild-from-scratch.
Outcome incremental_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::size_t datasets = 0, deletions = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 60)(rng);
        const int c = std::uniform_int_distribution<int>(2, 4)(rng);
        const int k = std::uniform_int_distribution<int>(1, 6)(rng);
        const Dataset ds = testing::random_small(n, 3, c, rng);
        const auto all = InstanceMask::all(n);
        const auto matrix = pairwise_matrix(ds, all, FeatureMask::all(3), DistanceSpec::fit(ds, all));
        auto g = NeighborhoodGraph::build(matrix, ds.labels(), c, k);
        auto state = compute_state(g);
        std::vector<std::uint8_t> alive(n, 1);
        std::vector<std::size_t> order = iota_rows(n);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t victim : order) {
            if (g.alive_count() <= 3) break;
            std::vector<std::size_t> counts(g.class_counts().begin(), g.class_counts().end());
            if (--counts[static_cast<std::size_t>(g.label(victim))] == 0 &&
                std::count_if(counts.begin(), counts.end(), [](std::size_t x) { return x > 0; }) < 2)
                continue;
            const auto affected = g.remove_instance(matrix, static_cast<NeighborhoodGraph::Index>(victim));
            state = update_state_after_removal(state, g, affected);
            alive[victim] = 0;
            ++deletions;
            const auto fresh = NeighborhoodGraph::build(matrix, ds.labels(), c, k, alive);
            const auto scratch = compute_state(fresh);
            if (!(g == fresh)) return {false, fmt("graph structure diverged on trial %d", trial)};
            if (state.n_dotdot != scratch.n_dotdot || state.alive != scratch.alive)
                return {false, fmt("state counters diverged on trial %d", trial)};
            for (std::size_t i = 0; i < n; ++i)
                worst = std::max(worst, std::fabs(state.u_loc[i] - scratch.u_loc[i]));
            worst = std::max({worst, std::fabs(state.u_tot - scratch.u_tot), std::fabs(state.u0 - scratch.u0),
                              std::fabs(state.rcg - scratch.rcg)});
        }
        ++datasets;
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 60.0,
            fmt("%zu datasets, %zu deletions, max abs error %.2e, %.2f s", datasets, deletions, worst, secs)};
}

// Steps of a trace that were committed, i.e. not undone by the following rollback.
std::vector<TraceStep> committed_removals(const ReductionTrace& trace) {
    std::vector<TraceStep> out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        if (s.kind != StepKind::remove_instance) continue;
        const bool undone = i + 1 < trace.steps.size() && trace.steps[i + 1].kind == StepKind::rollback;
        if (!undone) out.push_back(s);
    }
    return out;
}

// 3. Perfect separation is a fixed point.
Outcome perfect_separation() {
    double min_rcg = 1.0;
    std::size_t lowering = 0, lost_features = 0;
    const int seeds = 10;
    for (int seed = 1; seed <= seeds; ++seed) {
        const Dataset ds = testing::diagonal_blobs(200, static_cast<std::uint64_t>(seed));
        const auto all = InstanceMask::all(ds.rows());
        const auto cols = FeatureMask::all(2);
        const auto matrix = pairwise_matrix(ds, all, cols, DistanceSpec::fit(ds, all));
        min_rcg = std::min(min_rcg, compute_state(NeighborhoodGraph::build(matrix, ds.labels(), 2, 5)).rcg);

        AlgorithmConfig cfg;
        cfg.k = 5;
        const auto ps = psrcg(ds, all, cols, cfg);
        for (const auto& s : committed_removals(ps.trace))
            if (s.rcg_after < s.rcg_before) ++lowering;
        const auto joint = fsps_rcg(ds, all, cfg);
        lost_features += 2 - joint.features.count();
    }
    return {min_rcg >= 0.99 && lowering == 0 && lost_features == 0,
            fmt("%d seeds: min initial RCG %.4f, RCG-lowering commits %zu, informative features removed %zu", seeds,
                min_rcg, lowering, lost_features)};
}

// Rows removed by zero-uncertainty sweeps in `trace`.
std::set<std::size_t> swept_rows(const ReductionTrace& trace) {
    std::set<std::size_t> out;
    for (const auto& s : trace.steps)
        if (s.kind == StepKind::bulk_remove_zero_uloc) out.insert(s.targets.begin(), s.targets.end());
    return out;
}

// 4. Planted mislabeled points are purged by the sweeps.
Outcome mislabeled_purge() {
    const int seeds = 100;
    int ps_ok = 0, joint_ok = 0, planted_short = 0;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto planted = testing::blobs_with_mislabeled(400, 5, 4, 3.5, static_cast<std::uint64_t>(seed));
        if (planted.mislabeled.size() != 5) ++planted_short;
        const auto& ds = planted.data;
        const auto all = InstanceMask::all(ds.rows());
        AlgorithmConfig cfg;
        cfg.k = 5;

        auto informative = FeatureMask::none(ds.cols());
        informative.set(0);
        informative.set(1);
        const auto ps = psrcg(ds, all, informative, cfg);
        const auto ps_swept = swept_rows(ps.trace);
        if (std::all_of(planted.mislabeled.begin(), planted.mislabeled.end(),
                        [&](std::size_t r) { return ps_swept.count(r) && !ps.instances.test(r); }))
            ++ps_ok;

        const auto joint = fsps_rcg(ds, all, cfg);
        const auto joint_swept = swept_rows(joint.trace);
        if (std::all_of(planted.mislabeled.begin(), planted.mislabeled.end(),
                        [&](std::size_t r) { return joint_swept.count(r) && !joint.instances.test(r); }))
            ++joint_ok;
    }
    const bool pass = planted_short == 0 && ps_ok >= 95 && joint_ok >= 95;
    return {pass, fmt("5/5 purged on %d/%d seeds (psrcg sweep), %d/%d seeds (fsps sweeps)", ps_ok, seeds, joint_ok,
                      seeds)};
}

EvalResult evaluate(const Dataset& ds, Algorithm algo, std::uint64_t seed, std::optional<double> noise) {
    ExperimentConfig cfg;
    cfg.algorithm = algo;
    cfg.scheme = KFold{5, seed, true};
    // Default neighborhoods: a 1NN graph for fsrcg, k = 5 for the prototype selectors.
    cfg.classify_k = 5;
    if (noise) cfg.noise = NoiseSpec{*noise, seed ^ 0x9e3779b97f4a7c15ULL};
    return run_experiment(ds, cfg);
}

// 5. Label noise hurts the joint reduction less than plain 5NN.
Outcome noise_robustness() {
    const int seeds = 20;
    double drop_joint = 0.0, drop_plain = 0.0;
    std::size_t runs = 0;
    for (int seed = 1; seed <= seeds; ++seed) {
        for (const auto& ds : testing::synthetic_suite(static_cast<std::uint64_t>(seed))) {
            const auto s = static_cast<std::uint64_t>(seed);
            drop_joint += evaluate(ds, Algorithm::fsps, s, {}).accuracy - evaluate(ds, Algorithm::fsps, s, 0.1).accuracy;
            drop_plain += evaluate(ds, Algorithm::none, s, {}).accuracy - evaluate(ds, Algorithm::none, s, 0.1).accuracy;
            ++runs;
        }
    }
    drop_joint /= static_cast<double>(runs);
    drop_plain /= static_cast<double>(runs);
    return {drop_joint < drop_plain,
            fmt("mean accuracy drop under 10%% noise: fsps %.2f vs 5NN %.2f points (%zu dataset runs)", drop_joint,
                drop_plain, runs)};
}

// 6. Joint selection stores less than either single-axis method and beats the sequential pipeline.
Outcome joint_beats_sequential() {
    const int seeds = 20;
    const Algorithm algos[] = {Algorithm::fsps, Algorithm::psrcg, Algorithm::fsrcg, Algorithm::fsrcg_psrcg};
    double sxd[4] = {}, acc[4] = {};
    std::size_t runs = 0;
    for (int seed = 1; seed <= seeds; ++seed) {
        for (const auto& ds : testing::synthetic_suite(static_cast<std::uint64_t>(seed))) {
            for (int a = 0; a < 4; ++a) {
                const auto r = evaluate(ds, algos[a], static_cast<std::uint64_t>(seed), {});
                sxd[a] += r.size_times_dim_pct;
                acc[a] += r.accuracy;
            }
            ++runs;
        }
    }
    for (int a = 0; a < 4; ++a) {
        sxd[a] /= static_cast<double>(runs);
        acc[a] /= static_cast<double>(runs);
    }
    const bool pass = sxd[0] < sxd[1] && sxd[0] < sxd[2] && acc[0] > acc[3];
    return {pass, fmt("mean SizexDim%%: fsps %.1f, psrcg %.1f, fsrcg %.1f; accuracy: fsps %.2f vs fsrcg+psrcg %.2f",
                      sxd[0], sxd[1], sxd[2], acc[0], acc[3])};
}

// 7. Iris holdout band.
Outcome iris_band() {
    const auto t0 = Clock::now();
    const Dataset ds = load_csv(std::filesystem::path(RCG_DATA_DIR) / "iris.csv", "class");
    const int seeds = 20;
    double features = 0.0, instances = 0.0, acc_joint = 0.0, acc_plain = 0.0;
    for (int seed = 1; seed <= seeds; ++seed) {
        ExperimentConfig cfg;
        cfg.scheme = Holdout{1.0 / 3.0, static_cast<std::uint64_t>(seed), true};
        cfg.reduction.k = 5;
        cfg.classify_k = 5;
        cfg.algorithm = Algorithm::fsps;
        const auto joint = run_experiment(ds, cfg);
        cfg.algorithm = Algorithm::none;
        const auto plain = run_experiment(ds, cfg);
        features += static_cast<double>(joint.per_fold[0].retained_features);
        instances += joint.retained_instances_pct;
        acc_joint += joint.accuracy;
        acc_plain += plain.accuracy;
    }
    features /= seeds;
    instances /= seeds;
    acc_joint /= seeds;
    acc_plain /= seeds;
    const double secs = seconds_since(t0);
    const bool pass = features <= 3.0 && instances < 100.0 && std::fabs(acc_joint - acc_plain) <= 5.0 && secs < 120.0;
    return {pass, fmt("mean features %.2f/4, instances %.1f%%, accuracy fsps %.2f vs 5NN %.2f, %.2f s", features,
                      instances, acc_joint, acc_plain, secs)};
}

// 8. CNN and RNN are consistent and nested.
Outcome baseline_consistency() {
    std::size_t runs = 0, inconsistent = 0, not_nested = 0;
    auto check = [&](const Dataset& ds, const InstanceMask& train) {
        const auto cols = FeatureMask::all(ds.cols());
        const auto spec = DistanceSpec::fit(ds, train);
        const auto cnn = cnn_baseline(ds, train, cols);
        const auto rnn = rnn_baseline(ds, train, cols);
        if (!is_consistent_subset(ds, train, cnn, cols, spec)) ++inconsistent;
        if (!is_consistent_subset(ds, train, rnn, cols, spec)) ++inconsistent;
        for (std::size_t r : rnn.indices())
            if (!cnn.test(r)) {
                ++not_nested;
                break;
            }
        ++runs;
    };
    for (int seed = 1; seed <= 10; ++seed) {
        for (const auto& ds : testing::synthetic_suite(static_cast<std::uint64_t>(seed)))
            for (const auto& fold : split(ds, KFold{5, static_cast<std::uint64_t>(seed), true})) check(ds, fold.train);
        const auto blobs = testing::gaussian_blobs(120, 3, 2.0, static_cast<std::uint64_t>(seed));
        check(blobs, InstanceMask::all(blobs.rows()));
    }
    return {inconsistent == 0 && not_nested == 0,
            fmt("%zu runs: %zu inconsistent subsets, %zu RNN-not-within-CNN", runs, inconsistent, not_nested)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int invoke(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"rcgtool"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 9. Repeated CLI invocations write byte-identical structured results.
Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "rcg_acceptance_determinism";
    fs::remove_all(root);
    const std::string iris = (fs::path(RCG_DATA_DIR) / "iris.csv").string();
    struct Case {
        std::vector<std::string> args;
        std::string file;
    };
    const std::vector<Case> cases = {
        {{"reduce", "--algo", "fsps", "--data", iris, "--class-col", "class", "--k", "5", "--seed", "7"}, "report.json"},
        {{"eval", "--algo", "psrcg", "--data", iris, "--class-col", "class", "--cv", "5", "--noise", "0.1", "--seed", "3"},
         "results.json"},
        {{"compare", "--algos", "none,fsps,cnn,rnn", "--data", iris, "--class-col", "class", "--holdout", "0.3333",
          "--seed", "11"},
         "results.json"},
    };
    std::size_t identical = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        std::string first;
        bool same = true;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / std::to_string(i);
            fs::remove_all(dir);
            auto args = cases[i].args;
            args.insert(args.end(), {"--out", dir.string()});
            if (invoke(args) != 0) return {false, fmt("invocation %zu exited nonzero", i)};
            const auto bytes = slurp(dir / cases[i].file);
            if (rep == 0) first = bytes;
            else same = same && !bytes.empty() && bytes == first;
        }
        identical += same;
    }
    fs::remove_all(root);
    return {identical == cases.size(), fmt("%zu/%zu invocations byte-identical across reruns", identical, cases.size())};
}

// 10. Chi-square quantiles against table values.
Outcome chi_square_table() {
    const double q1 = chi_square_quantile(0.95, 1), q10 = chi_square_quantile(0.95, 10);
    const bool pass = std::fabs(q1 - 3.841) <= 1e-3 && std::fabs(q10 - 18.307) <= 1e-3;
    return {pass, fmt("chi2_1(0.95) = %.4f, chi2_10(0.95) = %.4f", q1, q10)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"formula suite vs brute-force oracle", formula_suite},
        {"incremental update vs rebuild", incremental_oracle},
        {"perfect-separation fixed point", perfect_separation},
        {"mislabeled purge", mislabeled_purge},
        {"noise-robustness ordering", noise_robustness},
        {"joint-beats-sequential ordering", joint_beats_sequential},
        {"iris band check", iris_band},
        {"baseline consistency", baseline_consistency},
        {"CLI determinism", determinism},
        {"chi-square quantiles", chi_square_table},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << o.detail << ")" << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
