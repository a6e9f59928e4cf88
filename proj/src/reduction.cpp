#include "rcg/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcg/error.hpp"
#include "rcg/metric.hpp"

namespace rcg {

std::string_view to_string(StepKind kind) {
    switch (kind) {
        case StepKind::add_feature: return "add_feature";
        case StepKind::remove_feature: return "remove_feature";
        case StepKind::remove_instance: return "remove_instance";
        case StepKind::bulk_remove_zero_uloc: return "bulk_remove_zero_uloc";
        case StepKind::rollback: return "rollback";
    }
    return "unknown";
}

std::size_t AlgorithmConfig::floor_for(int classes, int k_used) const {
    const std::size_t floor =
        min_alive.value_or(std::max(static_cast<std::size_t>(classes), static_cast<std::size_t>(k_used) + 2));
    if (floor < 2) throw std::invalid_argument("min_alive must be at least 2");
    return floor;
}

std::vector<ZeroUncertaintyKind> classify_zero_uncertainty(const NeighborhoodGraph& g) {
    std::vector<ZeroUncertaintyKind> kinds(g.size(), ZeroUncertaintyKind::none);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.alive(i) || g.degree(i) == 0) continue;
        const auto tallies = g.tallies(i);
        const auto pure = std::find(tallies.begin(), tallies.end(), static_cast<int>(g.degree(i)));
        if (pure == tallies.end()) continue;
        const bool same = (pure - tallies.begin()) == g.label(i);
        kinds[i] = same ? ZeroUncertaintyKind::center : ZeroUncertaintyKind::mislabeled;
    }
    return kinds;
}

std::pair<FeatureMask, InstanceMask> replay(const ReductionTrace& trace, FeatureMask features,
                                            InstanceMask instances) {
    for (const auto& step : trace.steps) {
        for (std::size_t t : step.targets) {
            switch (step.kind) {
                case StepKind::add_feature: features.set(t); break;
                case StepKind::remove_feature: features.reset(t); break;
                case StepKind::remove_instance:
                case StepKind::bulk_remove_zero_uloc: instances.reset(t); break;
                case StepKind::rollback: instances.set(t); break;
            }
        }
    }
    return {std::move(features), std::move(instances)};
}

namespace {

using Index = NeighborhoodGraph::Index;

struct Workspace {
    DistanceMatrix matrix;
    NeighborhoodGraph graph;
    UncertaintyState state;
};

Workspace evaluate(const Dataset& ds, const InstanceMask& imask, const FeatureMask& fmask, const DistanceSpec& spec,
                   int k, ReductionTrace& trace) {
    Workspace ws;
    ws.matrix = pairwise_matrix(ds, imask, fmask, spec);
    ws.graph = NeighborhoodGraph::build(ws.matrix, ds.labels(), ds.classes(), k);
    ++trace.graph_builds;
    ws.state = compute_state(ws.graph);
    return ws;
}

void require_two_classes(const Dataset& ds, const InstanceMask& train) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(ds.classes()), 0);
    for (std::size_t r : train.indices()) ++counts[static_cast<std::size_t>(ds.label(r))];
    if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2)
        throw degenerate_error("training rows hold fewer than two classes");
}

void require_mask_shapes(const Dataset& ds, const InstanceMask& train) {
    if (train.size() != ds.rows()) throw std::invalid_argument("training mask size does not match dataset");
}

void push_step(ReductionTrace& trace, StepKind kind, std::vector<std::size_t> targets, double before, double after,
               std::size_t alive, std::size_t selected) {
    trace.steps.push_back(TraceStep{kind, std::move(targets), before, after, alive, selected});
}

// Local index of the node with the largest local uncertainty; ties go to the
// smaller neighborhood, then the lower index.
Index select_most_uncertain(const Workspace& ws) {
    constexpr double tie = 1e-12;
    std::int64_t best = -1;
    for (std::size_t i = 0; i < ws.graph.size(); ++i) {
        if (!ws.graph.alive(i)) continue;
        if (best < 0) {
            best = static_cast<std::int64_t>(i);
            continue;
        }
        const auto b = static_cast<std::size_t>(best);
        const double u = ws.state.u_loc[i];
        const double ub = ws.state.u_loc[b];
        if (u > ub + tie || (std::abs(u - ub) <= tie && ws.graph.degree(i) < ws.graph.degree(b)))
            best = static_cast<std::int64_t>(i);
    }
    return static_cast<Index>(best);
}

// Deletes the most uncertain instance while RCG improves significantly and
// stays significant; the deletion that fails the test is undone on request.
std::string border_pruning(Workspace ws, InstanceMask& imask, const FeatureMask& fmask, std::size_t floor,
                           const AlgorithmConfig& cfg, ReductionTrace& trace) {
    const auto zero = RcgContext::zero();
    for (;;) {
        if (ws.graph.alive_count() <= floor) return "instance floor reached";

        const Index victim = select_most_uncertain(ws);
        const auto label = static_cast<std::size_t>(ws.graph.label(victim));
        if (ws.graph.class_counts()[label] == 1 && ws.state.classes_present == 2)
            return "deletion would leave a single class";

        const auto before = RcgContext::of(ws.state);
        const auto affected = ws.graph.remove_instance(ws.matrix, victim);
        auto next = update_state_after_removal(ws.state, ws.graph, affected);
        const auto after = RcgContext::of(next);
        const std::size_t row = ws.matrix.row_id(victim);

        imask.reset(row);
        push_step(trace, StepKind::remove_instance, {row}, before.rcg, after.rcg, imask.count(), fmask.count());

        const bool improved = significantly_greater(after, before, cfg.significance) &&
                              significantly_greater(after, zero, cfg.significance);
        if (!improved) {
            if (cfg.rollback_last_deletion) {
                imask.set(row);
                push_step(trace, StepKind::rollback, {row}, after.rcg, before.rcg, imask.count(), fmask.count());
            }
            return "RCG gain not significant";
        }
        ws.state = std::move(next);
    }
}

// Simultaneous removal of every zero-uncertainty node of `ws.graph`:
// mislabeled first, then centers by decreasing degree, stopping at the
// floor and never taking a class below `class_floor` members (a kNN vote
// needs that many to be won anywhere). Returns the workspace
// rebuilt on the survivors (unchanged when nothing is removed).
Workspace zero_uncertainty_sweep(const Dataset& ds, Workspace ws, InstanceMask& imask, const FeatureMask& fmask,
                                 const DistanceSpec& spec, std::size_t floor, std::size_t class_floor,
                                 ReductionTrace& trace) {
    const auto kinds = classify_zero_uncertainty(ws.graph);
    std::vector<Index> candidates;
    for (std::size_t i = 0; i < kinds.size(); ++i)
        if (kinds[i] != ZeroUncertaintyKind::none) candidates.push_back(static_cast<Index>(i));
    if (candidates.empty()) return ws;

    std::stable_sort(candidates.begin(), candidates.end(), [&](Index a, Index b) {
        const bool ma = kinds[a] == ZeroUncertaintyKind::mislabeled;
        const bool mb = kinds[b] == ZeroUncertaintyKind::mislabeled;
        if (ma != mb) return ma;
        return ws.graph.degree(a) > ws.graph.degree(b);
    });

    const std::size_t alive = ws.graph.alive_count();
    const std::size_t budget = alive > floor ? alive - floor : 0;
    std::vector<std::size_t> remaining(ws.graph.class_counts().begin(), ws.graph.class_counts().end());
    std::vector<std::size_t> removed;
    for (Index i : candidates) {
        if (removed.size() == budget) break;
        auto& left = remaining[static_cast<std::size_t>(ws.graph.label(i))];
        if (left <= std::max<std::size_t>(class_floor, 1)) continue;
        --left;
        removed.push_back(ws.matrix.row_id(i));
    }
    if (removed.empty()) return ws;

    std::sort(removed.begin(), removed.end());
    const double before = ws.state.rcg;
    for (std::size_t r : removed) imask.reset(r);
    Workspace next = evaluate(ds, imask, fmask, spec, ws.graph.k(), trace);
    push_step(trace, StepKind::bulk_remove_zero_uloc, std::move(removed), before, next.state.rcg, imask.count(),
              fmask.count());
    return next;
}

void check_prototype_inputs(const Dataset& ds, const InstanceMask& train, std::size_t floor) {
    require_mask_shapes(ds, train);
    require_two_classes(ds, train);
    if (train.count() < floor)
        throw std::invalid_argument("training set of " + std::to_string(train.count()) +
                                    " rows is below min_alive = " + std::to_string(floor));
}

}  // namespace

ReductionResult fsrcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg) {
    require_mask_shapes(ds, train);
    require_two_classes(ds, train);
    if (train.count() < 2) throw std::invalid_argument("fsrcg needs at least two training rows");

    const int k = cfg.k_for_feature_selection();
    const auto spec = DistanceSpec::fit(ds, train, cfg.normalize);
    ReductionResult result{FeatureMask::none(ds.cols()), train, {}};
    auto& trace = result.trace;
    trace.algorithm = "fsrcg";
    auto& features = result.features;

    RcgContext current = RcgContext::zero();
    while (features.count() < ds.cols()) {
        std::size_t best_col = 0;
        std::optional<RcgContext> best;
        for (std::size_t f = 0; f < ds.cols(); ++f) {
            if (features.test(f)) continue;
            auto candidate = features;
            candidate.set(f);
            const auto ctx = RcgContext::of(evaluate(ds, train, candidate, spec, k, trace).state);
            if (!best || ctx.rcg > best->rcg) {
                best = ctx;
                best_col = f;
            }
        }
        const double before = current.constant_zero ? 0.0 : current.rcg;
        if (significantly_greater(*best, current, cfg.significance)) {
            features.set(best_col);
            push_step(trace, StepKind::add_feature, {best_col}, before, best->rcg, train.count(), features.count());
            current = *best;
            continue;
        }
        if (features.count() == 0) {
            features.set(best_col);
            push_step(trace, StepKind::add_feature, {best_col}, before, best->rcg, train.count(), features.count());
            trace.halt_reason = "no significant single feature; kept the best one";
        } else {
            trace.halt_reason = "no significant gain from another feature";
        }
        return result;
    }
    trace.halt_reason = "all features selected";
    return result;
}

ReductionResult psrcg(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask,
                      const AlgorithmConfig& cfg) {
    const int k = cfg.k_for_prototype_selection();
    const std::size_t floor = cfg.floor_for(ds.classes(), k);
    check_prototype_inputs(ds, train, floor);
    if (fmask.count() == 0) throw std::invalid_argument("psrcg needs a nonempty feature mask");

    const auto spec = DistanceSpec::fit(ds, train, cfg.normalize);
    ReductionResult result{fmask, train, {}};
    auto& trace = result.trace;
    trace.algorithm = "psrcg";

    auto ws = evaluate(ds, result.instances, fmask, spec, k, trace);
    const auto phase1 = border_pruning(std::move(ws), result.instances, fmask, floor, cfg, trace);

    const std::size_t before_sweep = result.instances.count();
    auto wide = evaluate(ds, result.instances, fmask, spec, k + 1, trace);
    zero_uncertainty_sweep(ds, std::move(wide), result.instances, fmask, spec, floor,
                           static_cast<std::size_t>(k), trace);
    trace.halt_reason = "border pruning: " + phase1 + "; (k+1)-NN sweep removed " +
                        std::to_string(before_sweep - result.instances.count()) + " instances";
    return result;
}

ReductionResult fsps_rcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg) {
    const int k = cfg.k_for_prototype_selection();
    const std::size_t floor = cfg.floor_for(ds.classes(), k);
    check_prototype_inputs(ds, train, floor);

    const auto spec = DistanceSpec::fit(ds, train, cfg.normalize);
    ReductionResult result{FeatureMask::all(ds.cols()), train, {}};
    auto& trace = result.trace;
    trace.algorithm = "fsps";
    auto& features = result.features;
    auto& instances = result.instances;

    auto current = evaluate(ds, instances, features, spec, k, trace);
    std::string stage_a;
    for (;;) {
        if (features.count() <= 1) {
            stage_a = "one feature left";
            break;
        }
        std::size_t best_col = 0;
        std::optional<Workspace> best;
        for (std::size_t f : features.indices()) {
            auto candidate = features;
            candidate.reset(f);
            auto ws = evaluate(ds, instances, candidate, spec, k, trace);
            const bool better = !best || (cfg.literal_min_selection ? ws.state.rcg < best->state.rcg
                                                                    : ws.state.rcg > best->state.rcg);
            if (better) {
                best = std::move(ws);
                best_col = f;
            }
        }
        const auto before = RcgContext::of(current.state);
        const auto after = RcgContext::of(best->state);
        if (!significantly_greater(after, before, cfg.significance)) {
            stage_a = "no feature removal improves RCG significantly";
            break;
        }
        features.reset(best_col);
        push_step(trace, StepKind::remove_feature, {best_col}, before.rcg, after.rcg, instances.count(),
                  features.count());
        current = zero_uncertainty_sweep(ds, std::move(*best), instances, features, spec, floor,
                                         static_cast<std::size_t>(k), trace);
    }

    const auto stage_b = border_pruning(std::move(current), instances, features, floor, cfg, trace);
    trace.halt_reason = "feature elimination: " + stage_a + "; border pruning: " + stage_b;

    if (cfg.final_centers_pass) {
        auto wide = evaluate(ds, instances, features, spec, k + 1, trace);
        zero_uncertainty_sweep(ds, std::move(wide), instances, features, spec, floor,
                               static_cast<std::size_t>(k), trace);
    }
    return result;
}

ReductionResult fsrcg_then_psrcg(const Dataset& ds, const InstanceMask& train, const AlgorithmConfig& cfg) {
    auto fs = fsrcg(ds, train, cfg);
    auto ps = psrcg(ds, train, fs.features, cfg);
    ReductionResult result{fs.features, ps.instances, {}};
    auto& trace = result.trace;
    trace.algorithm = "fsrcg+psrcg";
    trace.steps = std::move(fs.trace.steps);
    trace.steps.insert(trace.steps.end(), ps.trace.steps.begin(), ps.trace.steps.end());
    trace.graph_builds = fs.trace.graph_builds + ps.trace.graph_builds;
    trace.halt_reason = "fsrcg: " + fs.trace.halt_reason + "; psrcg: " + ps.trace.halt_reason;
    return result;
}

namespace {

// Label of the nearest member of `subset` (distance, then lower index).
int nearest_label(const DistanceMatrix& matrix, std::span<const int> local_labels,
                  const std::vector<std::uint8_t>& subset, std::size_t i) {
    const auto dist = matrix.row(i);
    std::int64_t best = -1;
    for (std::size_t j = 0; j < subset.size(); ++j) {
        if (!subset[j]) continue;
        if (best < 0 || dist[j] < dist[static_cast<std::size_t>(best)]) best = static_cast<std::int64_t>(j);
    }
    return local_labels[static_cast<std::size_t>(best)];
}

bool consistent(const DistanceMatrix& matrix, std::span<const int> local_labels,
                const std::vector<std::uint8_t>& subset) {
    for (std::size_t i = 0; i < subset.size(); ++i)
        if (!subset[i] && nearest_label(matrix, local_labels, subset, i) != local_labels[i]) return false;
    return true;
}

struct LocalView {
    DistanceMatrix matrix;
    std::vector<int> labels;
};

LocalView local_view(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask,
                     const DistanceSpec& spec) {
    LocalView v{pairwise_matrix(ds, train, fmask, spec), {}};
    for (std::size_t r : v.matrix.row_ids()) v.labels.push_back(ds.label(r));
    return v;
}

std::vector<std::uint8_t> condense(const LocalView& v, int classes) {
    const std::size_t m = v.labels.size();
    std::vector<std::uint8_t> subset(m, 0);
    std::vector<std::uint8_t> seeded(static_cast<std::size_t>(classes), 0);
    for (std::size_t i = 0; i < m; ++i) {
        auto& s = seeded[static_cast<std::size_t>(v.labels[i])];
        if (!s) {
            s = 1;
            subset[i] = 1;
        }
    }
    for (bool added = true; added;) {
        added = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (subset[i]) continue;
            if (nearest_label(v.matrix, v.labels, subset, i) != v.labels[i]) {
                subset[i] = 1;
                added = true;
            }
        }
    }
    return subset;
}

InstanceMask to_mask(const Dataset& ds, const LocalView& v, const std::vector<std::uint8_t>& subset) {
    InstanceMask out = InstanceMask::none(ds.rows());
    for (std::size_t i = 0; i < subset.size(); ++i)
        if (subset[i]) out.set(v.matrix.row_id(i));
    return out;
}

}  // namespace

InstanceMask cnn_baseline(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask, bool normalize) {
    require_mask_shapes(ds, train);
    if (train.count() == 0) throw std::invalid_argument("cnn needs a nonempty training set");
    const auto spec = DistanceSpec::fit(ds, train, normalize);
    const auto v = local_view(ds, train, fmask, spec);
    return to_mask(ds, v, condense(v, ds.classes()));
}

InstanceMask rnn_baseline(const Dataset& ds, const InstanceMask& train, const FeatureMask& fmask, bool normalize) {
    require_mask_shapes(ds, train);
    if (train.count() == 0) throw std::invalid_argument("rnn needs a nonempty training set");
    const auto spec = DistanceSpec::fit(ds, train, normalize);
    const auto v = local_view(ds, train, fmask, spec);
    auto subset = condense(v, ds.classes());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (!subset[i]) continue;
        subset[i] = 0;
        if (std::count(subset.begin(), subset.end(), 1) == 0 || !consistent(v.matrix, v.labels, subset))
            subset[i] = 1;
    }
    return to_mask(ds, v, subset);
}

bool is_consistent_subset(const Dataset& ds, const InstanceMask& train, const InstanceMask& subset,
                          const FeatureMask& fmask, const DistanceSpec& spec) {
    const auto v = local_view(ds, train, fmask, spec);
    std::vector<std::uint8_t> local(v.labels.size(), 0);
    for (std::size_t i = 0; i < local.size(); ++i) local[i] = subset.test(v.matrix.row_id(i)) ? 1 : 0;
    if (std::count(local.begin(), local.end(), 1) == 0) return false;
    return consistent(v.matrix, v.labels, local);
}

}  // namespace rcg
