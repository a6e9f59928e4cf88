#include "rcg/uncertainty.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "rcg/error.hpp"

namespace rcg {

double quadratic_entropy(std::span<const double> distribution) {
    double total = 0.0;
    double qe = 0.0;
    for (double g : distribution) {
        if (!(g >= 0.0)) throw std::invalid_argument("probability entries must be nonnegative");
        total += g;
        qe += g * (1.0 - g);
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("probability vector does not sum to 1");
    return qe;
}

double prior_uncertainty_from_counts(std::span<const std::size_t> class_counts) {
    std::size_t n = 0;
    for (auto c : class_counts) n += c;
    if (n == 0) throw std::invalid_argument("prior uncertainty of an empty sample");
    double qe = 0.0;
    for (auto c : class_counts) {
        const double f = static_cast<double>(c) / static_cast<double>(n);
        qe += f * (1.0 - f);
    }
    return qe;
}

double prior_uncertainty(std::span<const int> labels, int num_classes) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw std::invalid_argument("label out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    return prior_uncertainty_from_counts(counts);
}

double local_uncertainty(std::span<const int> tallies) {
    int n = 0;
    for (int t : tallies) n += t;
    if (n == 0) return 0.0;
    double u = 0.0;
    for (int t : tallies) {
        const double f = static_cast<double>(t) / static_cast<double>(n);
        u += f * (1.0 - f);
    }
    return u;
}

namespace {

void finish(UncertaintyState& s, const NeighborhoodGraph& g) {
    s.alive = g.alive_count();
    s.n_dotdot = g.degree_sum();
    s.classes_present = 0;
    for (auto c : g.class_counts())
        if (c > 0) ++s.classes_present;
    if (s.classes_present < 2) throw degenerate_error("fewer than two classes among alive instances");
    s.u0 = prior_uncertainty_from_counts(g.class_counts());

    const double total = static_cast<double>(s.n_dotdot);
    s.u_tot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.alive(i)) {
            s.u_loc[i] = 0.0;
            continue;
        }
        s.u_tot += static_cast<double>(g.degree(i)) / total * s.u_loc[i];
    }
    s.rcg = (s.u0 - s.u_tot) / s.u0;
}

}  // namespace

UncertaintyState compute_state(const NeighborhoodGraph& g) {
    UncertaintyState s;
    s.u_loc.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.alive(i)) s.u_loc[i] = local_uncertainty(g.tallies(i));
    finish(s, g);
    return s;
}

UncertaintyState update_state_after_removal(const UncertaintyState& prev, const NeighborhoodGraph& g,
                                            std::span<const NeighborhoodGraph::Index> affected) {
    if (prev.u_loc.size() != g.size()) throw std::invalid_argument("state does not belong to this graph");
    UncertaintyState s = prev;
    for (auto i : affected)
        s.u_loc[i] = g.alive(i) ? local_uncertainty(g.tallies(i)) : 0.0;
    finish(s, g);
    return s;
}

double chi_square_quantile(double p, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("chi-square needs positive degrees of freedom");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

double chi_square_dof(const RcgContext& x) {
    if (x.alive < 2 || x.classes < 2)
        throw std::invalid_argument("chi-square test needs n >= 2 and c >= 2 degrees of freedom");
    return static_cast<double>(x.alive - 1) * static_cast<double>(x.classes - 1);
}

double catanova_statistic(const RcgContext& x) {
    if (x.n_dotdot < 1) throw std::invalid_argument("statistic needs a nonempty graph");
    return (static_cast<double>(x.n_dotdot) - 1.0) * static_cast<double>(x.classes - 1) * x.rcg;
}

namespace {

bool significant_vs_zero(const RcgContext& a, double alpha) {
    const double critical = chi_square_quantile(1.0 - alpha, chi_square_dof(a));
    return catanova_statistic(a) > critical;
}

}  // namespace

bool significantly_greater(const RcgContext& a, const RcgContext& b, const SignificanceSpec& spec) {
    if (const auto* eps = std::get_if<EpsilonMargin>(&spec)) {
        if (eps->epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
        const double reference = b.constant_zero ? 0.0 : b.rcg;
        return a.rcg > reference + eps->epsilon;
    }
    const double alpha = std::get<ChiSquare>(spec).alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (b.constant_zero) return significant_vs_zero(a, alpha);
    chi_square_dof(b);
    if (!(a.rcg > b.rcg)) return false;
    if (!(catanova_statistic(a) > catanova_statistic(b))) return false;
    return significant_vs_zero(a, alpha);
}

}  // namespace rcg
