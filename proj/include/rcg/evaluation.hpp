#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcg/data_model.hpp"
#include "rcg/metric.hpp"
#include "rcg/reduction.hpp"

namespace rcg {

enum class Algorithm { none, fsrcg, psrcg, fsps, cnn, rnn, fsrcg_psrcg };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::span<const Algorithm> all_algorithms();

/// Runs one named reduction on the training rows of `ds`.
ReductionResult reduce(const Dataset& ds, const InstanceMask& train, Algorithm algorithm, const AlgorithmConfig& cfg);

/// Majority vote among the k nearest prototypes (distance, then lower row).
/// A tied vote goes to the tied class whose member ranks nearest.
int knn_classify(const Dataset& ds, const InstanceMask& prototypes, const FeatureMask& fmask, const DistanceSpec& spec,
                 std::size_t query_row, int k);
int knn_classify(const Dataset& ds, const InstanceMask& prototypes, const FeatureMask& fmask, const DistanceSpec& spec,
                 std::span<const double> query, int k);

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::none;
    SplitScheme scheme = KFold{};
    AlgorithmConfig reduction;
    int classify_k = 5;
    /// Applied to the training rows of each fold only.
    std::optional<NoiseSpec> noise;
};

struct FoldRecord {
    std::size_t fold = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t noisy_labels = 0;
    std::size_t retained_instances = 0;
    std::size_t retained_features = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;  // percent
    std::size_t graph_builds = 0;
    std::vector<std::size_t> selected_features;
};

struct EvalResult {
    std::string algorithm;
    std::string split_signature;
    std::size_t total_features = 0;
    double accuracy = 0.0;
    double retained_instances_pct = 0.0;
    double retained_features_pct = 0.0;
    double size_times_dim_pct = 0.0;
    std::vector<FoldRecord> per_fold;
    double runtime_ms = 0.0;
    std::size_t graph_builds = 0;
};

/// Per fold: optionally noise the training labels, reduce on the training
/// rows only, then classify the untouched test rows over the reduced view.
EvalResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg);

struct PairedT {
    double t = 0.0;
    double df = 0.0;
    double mean_difference = 0.0;
    double p_two_sided = 1.0;
    double p_one_sided = 0.5;  // H1: mean(first - second) > 0
};

/// Student paired t-test; NaN fields when fewer than two pairs.
PairedT paired_t_test(std::span<const double> first, std::span<const double> second);

struct ComparisonRow {
    std::string algorithm;
    double size_pct = 0.0;
    double dim_pct = 0.0;
    double size_times_dim_pct = 0.0;
    double accuracy = 0.0;
};

struct PairwiseTest {
    std::string first;
    std::string second;
    PairedT test;
};

struct ComparisonTable {
    std::string split_signature;
    std::vector<ComparisonRow> rows;  // ascending Size x Dim
    std::vector<PairwiseTest> tests;  // every pair, input order
};

/// Throws std::invalid_argument when results were produced on different splits.
ComparisonTable compare_table(std::span<const EvalResult> results);

void print_summary_row(std::ostream& out, const EvalResult& result);
void print_table(std::ostream& out, const ComparisonTable& table);

}  // namespace rcg
