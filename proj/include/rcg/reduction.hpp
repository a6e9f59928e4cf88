#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcg/data_model.hpp"
#include "rcg/knn_graph.hpp"
#include "rcg/uncertainty.hpp"

namespace rcg {

enum class StepKind {
    add_feature,
    remove_feature,
    remove_instance,
    bulk_remove_zero_uloc,
    rollback,
};

std::string_view to_string(StepKind kind);

struct TraceStep {
    StepKind kind;
    std::vector<std::size_t> targets;  // dataset row or column ids
    double rcg_before = 0.0;
    double rcg_after = 0.0;
    std::size_t alive_count = 0;     // after the step
    std::size_t selected_count = 0;  // after the step
};

struct ReductionTrace {
    std::string algorithm;
    std::vector<TraceStep> steps;
    std::string halt_reason;
    std::size_t graph_builds = 0;
};

struct AlgorithmConfig {
    /// Unset means the algorithm default: 1 for fsrcg, 5 otherwise.
    std::optional<int> k;
    SignificanceSpec significance = ChiSquare{};
    bool rollback_last_deletion = true;
    /// Unset means max(c, k + 2).
    std::optional<std::size_t> min_alive;
    bool normalize = true;
    /// Backward elimination picks the candidate whose removal minimizes RCG
    /// instead of maximizing it.
    bool literal_min_selection = false;
    /// Append the (k+1)-NN zero-uncertainty sweep after fsps border pruning.
    bool final_centers_pass = false;

    int k_for_feature_selection() const { return k.value_or(1); }
    int k_for_prototype_selection() const { return k.value_or(5); }
    std::size_t floor_for(int classes, int k_used) const;
};

struct ReductionResult {
    FeatureMask features;
    InstanceMask instances;
    ReductionTrace trace;
};

/// Forward greedy feature selection on RCG over a k-graph of the training rows.
ReductionResult fsrcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg);

/// Uncertainty-driven border pruning followed by a (k+1)-NN sweep of
/// zero-uncertainty (center or mislabeled) instances.
ReductionResult psrcg(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask,
                      const AlgorithmConfig& cfg);

/// Joint backward feature elimination with interleaved zero-uncertainty
/// sweeps, then border pruning in the final feature space.
ReductionResult fsps_rcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg);

/// fsrcg, then psrcg in the selected feature space.
ReductionResult fsrcg_then_psrcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg);

/// Hart's condensed nearest neighbor rule (1NN, row-order scans, lowest-index seed per class).
InstanceMask cnn_baseline(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask,
                          bool normalize = true);

/// Gates' reduced nearest neighbor rule: single pass of consistency-preserving deletions from the CNN subset.
InstanceMask rnn_baseline(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask,
                          bool normalize = true);

/// True when 1NN over `subset` labels every row of `train` correctly
/// (members of the subset count as correct).
bool is_consistent_subset(const Dataset& ds, const InstanceMask& train, const InstanceMask& subset,
                          const FeatureMask& fmask, const DistanceSpec& spec);

enum class ZeroUncertaintyKind { none, center, mislabeled };

/// Zero-uncertainty status per local node: center when every neighbor shares
/// its label, mislabeled when every neighbor carries one other label.
std::vector<ZeroUncertaintyKind> classify_zero_uncertainty(const NeighborhoodGraph& g);

/// Re-applies trace actions to starting masks.
std::pair<FeatureMask, InstanceMask> replay(const ReductionTrace& trace, FeatureMask features, InstanceMask instances);

}  // namespace rcg
