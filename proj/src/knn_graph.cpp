#include "rcg/knn_graph.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rcg {

namespace {

using Index = NeighborhoodGraph::Index;

// Total order on candidates seen from one node: distance, then lower index.
bool nearer(std::span<const double> dist, Index a, Index b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
}

void insert_sorted(std::vector<Index>& v, Index x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }

void erase_sorted(std::vector<Index>& v, Index x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

bool contains_sorted(const std::vector<Index>& v, Index x) { return std::binary_search(v.begin(), v.end(), x); }

}  // namespace

NeighborhoodGraph NeighborhoodGraph::build(const DistanceMatrix& matrix, std::span<const int> labels,
                                           int num_classes, int k, std::span<const std::uint8_t> alive) {
    if (k < 1) throw std::invalid_argument("neighborhood size k must be at least 1");
    if (num_classes < 1) throw std::invalid_argument("graph needs at least one class");
    const std::size_t m = matrix.size();
    if (!alive.empty() && alive.size() != m) throw std::invalid_argument("alive mask size does not match matrix");

    NeighborhoodGraph g;
    g.k_ = k;
    g.num_classes_ = num_classes;
    g.labels_.resize(m);
    g.alive_.assign(m, 1);
    if (!alive.empty()) std::transform(alive.begin(), alive.end(), g.alive_.begin(), [](auto a) { return a ? 1 : 0; });
    g.alive_count_ = static_cast<std::size_t>(std::count(g.alive_.begin(), g.alive_.end(), 1));
    if (g.alive_count_ < 2) throw std::invalid_argument("kNN graph needs at least two alive instances");

    g.class_counts_.assign(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const int y = labels[matrix.row_id(i)];
        if (y < 0 || y >= num_classes) throw std::invalid_argument("label out of range for graph");
        g.labels_[i] = y;
        if (g.alive_[i]) ++g.class_counts_[static_cast<std::size_t>(y)];
    }

    g.out_.assign(m, {});
    g.adj_.assign(m, {});
    g.tallies_.assign(m * static_cast<std::size_t>(num_classes), 0);

    std::vector<Index> candidates;
    candidates.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!g.alive_[i]) continue;
        candidates.clear();
        for (std::size_t j = 0; j < m; ++j)
            if (j != i && g.alive_[j]) candidates.push_back(static_cast<Index>(j));
        const auto take = std::min(static_cast<std::size_t>(k), candidates.size());
        const auto dist = matrix.row(i);
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end(), [&](Index a, Index b) { return nearer(dist, a, b); });
        g.out_[i].assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take));
    }
    for (std::size_t i = 0; i < m; ++i)
        for (Index j : g.out_[i])
            if (!contains_sorted(g.adj_[i], j)) g.link(static_cast<Index>(i), j);
    return g;
}

void NeighborhoodGraph::link(Index a, Index b) {
    insert_sorted(adj_[a], b);
    insert_sorted(adj_[b], a);
    const auto c = static_cast<std::size_t>(num_classes_);
    ++tallies_[a * c + static_cast<std::size_t>(labels_[b])];
    ++tallies_[b * c + static_cast<std::size_t>(labels_[a])];
    ++edge_count_;
}

std::int64_t NeighborhoodGraph::next_candidate(const DistanceMatrix& matrix, Index i, std::int64_t skip) const {
    const auto dist = matrix.row(i);
    const auto& listed = out_[i];
    std::int64_t best = -1;
    for (std::size_t j = 0; j < alive_.size(); ++j) {
        const auto cand = static_cast<Index>(j);
        if (!alive_[j] || j == i || static_cast<std::int64_t>(j) == skip) continue;
        if (std::find(listed.begin(), listed.end(), cand) != listed.end()) continue;
        if (best < 0 || nearer(dist, cand, static_cast<Index>(best))) best = cand;
    }
    return best;
}

std::vector<Index> NeighborhoodGraph::affected_set(const DistanceMatrix& matrix, Index victim) const {
    if (victim >= alive_.size() || !alive_[victim]) throw std::invalid_argument("victim is not an alive instance");
    std::vector<Index> out = adj_[victim];
    for (Index j : adj_[victim]) {
        const auto& listed = out_[j];
        if (std::find(listed.begin(), listed.end(), victim) == listed.end()) continue;
        const auto w = next_candidate(matrix, j, victim);
        if (w >= 0 && !contains_sorted(adj_[j], static_cast<Index>(w))) out.push_back(static_cast<Index>(w));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Index> NeighborhoodGraph::remove_instance(const DistanceMatrix& matrix, Index victim) {
    if (victim >= alive_.size() || !alive_[victim]) throw std::invalid_argument("victim is not an alive instance");
    if (alive_count_ < 3) throw std::invalid_argument("removal would leave fewer than two alive instances");

    const auto c = static_cast<std::size_t>(num_classes_);
    std::vector<Index> affected = adj_[victim];
    std::vector<Index> holders;
    for (Index u : adj_[victim]) {
        const auto& listed = out_[u];
        if (std::find(listed.begin(), listed.end(), victim) != listed.end()) holders.push_back(u);
        erase_sorted(adj_[u], victim);
        --tallies_[u * c + static_cast<std::size_t>(labels_[victim])];
    }
    edge_count_ -= adj_[victim].size();
    adj_[victim].clear();
    out_[victim].clear();
    std::fill_n(tallies_.begin() + static_cast<std::ptrdiff_t>(victim * c), c, 0);
    alive_[victim] = 0;
    --alive_count_;
    --class_counts_[static_cast<std::size_t>(labels_[victim])];

    for (Index j : holders) {
        auto& listed = out_[j];
        listed.erase(std::find(listed.begin(), listed.end(), victim));
        const auto w = next_candidate(matrix, j, -1);
        if (w < 0) continue;
        listed.push_back(static_cast<Index>(w));
        if (!contains_sorted(adj_[j], static_cast<Index>(w))) {
            link(j, static_cast<Index>(w));
            affected.push_back(static_cast<Index>(w));
        }
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    return affected;
}

bool operator==(const NeighborhoodGraph& a, const NeighborhoodGraph& b) {
    if (a.k_ != b.k_ || a.num_classes_ != b.num_classes_ || a.alive_ != b.alive_ || a.edge_count_ != b.edge_count_ ||
        a.alive_count_ != b.alive_count_ || a.class_counts_ != b.class_counts_)
        return false;
    for (std::size_t i = 0; i < a.alive_.size(); ++i) {
        if (!a.alive_[i]) continue;
        if (a.labels_[i] != b.labels_[i] || a.out_[i] != b.out_[i] || a.adj_[i] != b.adj_[i]) return false;
        if (!std::ranges::equal(a.tallies(i), b.tallies(i))) return false;
    }
    return true;
}

void write_edge_list(std::ostream& out, const NeighborhoodGraph& g, const DistanceMatrix& matrix) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.alive(i)) continue;
        for (auto j : g.neighbors(i))
            if (j > i) out << matrix.row_id(i) << ' ' << matrix.row_id(j) << ' ' << matrix.at(i, j) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace rcg
