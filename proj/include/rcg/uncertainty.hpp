#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "rcg/knn_graph.hpp"

namespace rcg {

/// Sum of g_j (1 - g_j) over a probability vector. Throws
/// std::invalid_argument unless entries are nonnegative and sum to 1 (1e-9).
double quadratic_entropy(std::span<const double> distribution);

/// Quadratic entropy of the empirical class frequencies (U_0).
double prior_uncertainty(std::span<const int> labels, int num_classes);
double prior_uncertainty_from_counts(std::span<const std::size_t> class_counts);

/// Local uncertainty of one node from its class tallies over N(i).
double local_uncertainty(std::span<const int> tallies);

struct UncertaintyState {
    std::vector<double> u_loc;  // by local index; 0 for dead nodes
    double u_tot = 0.0;
    double u0 = 0.0;
    double rcg = 0.0;
    std::size_t n_dotdot = 0;  // 2|E|
    std::size_t alive = 0;
    int classes_present = 0;

    friend bool operator==(const UncertaintyState&, const UncertaintyState&) = default;
};

/// Throws degenerate_error when fewer than two classes are alive (U_0 = 0).
UncertaintyState compute_state(const NeighborhoodGraph& g);

/// Refreshes u_loc on `affected` only and re-derives the aggregates. Equal
/// to compute_state(g) whenever `affected` covers every changed tally.
UncertaintyState update_state_after_removal(const UncertaintyState& prev, const NeighborhoodGraph& g,
                                            std::span<const NeighborhoodGraph::Index> affected);

/// What the significance test needs to know about one RCG value.
struct RcgContext {
    double rcg = 0.0;
    std::size_t alive = 0;
    int classes = 0;
    std::size_t n_dotdot = 0;
    bool constant_zero = false;

    static RcgContext zero() { return RcgContext{0.0, 0, 0, 0, true}; }
    static RcgContext of(const UncertaintyState& s) { return RcgContext{s.rcg, s.alive, s.classes_present, s.n_dotdot}; }
};

struct ChiSquare {
    double alpha = 0.05;
};
struct EpsilonMargin {
    double epsilon = 1e-9;
};
using SignificanceSpec = std::variant<ChiSquare, EpsilonMargin>;

/// Upper-tail critical value: the p-quantile of chi-square with `df` degrees.
double chi_square_quantile(double p, double df);

/// (n.. - 1)(c - 1) * RCG.
double catanova_statistic(const RcgContext& x);

/// Degrees of freedom (n - 1)(c - 1) with n the alive count.
double chi_square_dof(const RcgContext& x);

/// The ">>" comparison. Against RcgContext::zero(): ChiSquare accepts when the
/// statistic of `a` exceeds the (1 - alpha) quantile; otherwise it requires a
/// strict RCG gain, a larger statistic, and `a` individually significant.
/// EpsilonMargin accepts when rcg(a) > rcg(b) + epsilon.
bool significantly_greater(const RcgContext& a, const RcgContext& b, const SignificanceSpec& spec);

}  // namespace rcg
