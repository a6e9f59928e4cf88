#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace rcg::oracle {

Matrix distances(const Dataset& ds, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    std::map<std::size_t, std::pair<double, double>> range;
    for (std::size_t c : cols) {
        double lo = ds.value(rows[0], c), hi = lo;
        for (std::size_t r : rows) {
            lo = std::min(lo, ds.value(r, c));
            hi = std::max(hi, ds.value(r, c));
        }
        range[c] = {lo, hi};
    }
    Matrix d(rows.size(), std::vector<double>(rows.size(), 0.0));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) {
            double s = 0.0;
            for (std::size_t c : cols) {
                const double a = ds.value(rows[i], c), b = ds.value(rows[j], c);
                double term;
                if (ds.feature(c).kind == FeatureKind::categorical) {
                    term = a == b ? 0.0 : 1.0;
                } else {
                    const double width = range[c].second - range[c].first;
                    term = width == 0.0 ? 0.0 : std::fabs(a - b) / width;
                }
                s += term * term;
            }
            d[i][j] = std::sqrt(s);
        }
    return d;
}

std::set<std::pair<std::size_t, std::size_t>> knn_edges(const Matrix& d, int k) {
    std::set<std::pair<std::size_t, std::size_t>> edges;
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
            if (d[i][a] != d[i][b]) return d[i][a] < d[i][b];
            return a < b;
        });
        for (std::size_t t = 0; t < others.size() && t < static_cast<std::size_t>(k); ++t)
            edges.insert({std::min(i, others[t]), std::max(i, others[t])});
    }
    return edges;
}

double gini(const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p) s += x * (1.0 - x);
    return s;
}

State uncertainty(const std::set<std::pair<std::size_t, std::size_t>>& edges, const std::vector<int>& labels,
                  int num_classes) {
    const std::size_t n = labels.size();
    const auto c = static_cast<std::size_t>(num_classes);
    std::vector<std::vector<double>> tally(n, std::vector<double>(c, 0.0));
    for (const auto& [a, b] : edges) {
        tally[a][static_cast<std::size_t>(labels[b])] += 1;
        tally[b][static_cast<std::size_t>(labels[a])] += 1;
    }
    State s;
    s.n_dotdot = 2 * edges.size();
    s.u_loc.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double deg = std::accumulate(tally[i].begin(), tally[i].end(), 0.0);
        std::vector<double> p(c);
        for (std::size_t j = 0; j < c; ++j) p[j] = tally[i][j] / deg;
        s.u_loc[i] = gini(p);
        s.u_tot += deg / static_cast<double>(s.n_dotdot) * s.u_loc[i];
    }
    std::vector<double> prior(c, 0.0);
    for (int y : labels) prior[static_cast<std::size_t>(y)] += 1.0 / static_cast<double>(n);
    s.u0 = gini(prior);
    s.rcg = (s.u0 - s.u_tot) / s.u0;
    return s;
}

int knn_predict(const Dataset& ds, const std::vector<std::size_t>& fit_rows, const std::vector<std::size_t>& prototypes,
                std::size_t query, int k) {
    std::vector<std::size_t> cols(ds.cols());
    std::iota(cols.begin(), cols.end(), 0);
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t p : prototypes) {
        double s = 0.0;
        for (std::size_t c : cols) {
            double lo = ds.value(fit_rows[0], c), hi = lo;
            for (std::size_t r : fit_rows) {
                lo = std::min(lo, ds.value(r, c));
                hi = std::max(hi, ds.value(r, c));
            }
            double term;
            if (ds.feature(c).kind == FeatureKind::categorical) {
                term = ds.value(query, c) == ds.value(p, c) ? 0.0 : 1.0;
            } else {
                term = hi == lo ? 0.0 : std::min(1.0, std::fabs(ds.value(query, c) - ds.value(p, c)) / (hi - lo));
            }
            s += term * term;
        }
        ranked.emplace_back(std::sqrt(s), p);
    }
    std::sort(ranked.begin(), ranked.end());
    ranked.resize(std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k)));
    std::map<int, int> votes;
    for (const auto& [dist, p] : ranked) ++votes[ds.label(p)];
    int best = 0;
    for (const auto& [y, v] : votes) best = std::max(best, v);
    for (const auto& [dist, p] : ranked)
        if (votes[ds.label(p)] == best) return ds.label(p);
    return -1;
}

double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += (a[i] - b[i]) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
    return mean / std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace rcg::oracle
