#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rcg/metric.hpp"

namespace rcg {

/// Union-symmetrized kNN graph over the local indices of a DistanceMatrix.
///
/// Each alive node keeps its k nearest alive others (ordered by distance,
/// then lower index). Node i and j share an edge when either lists the other,
/// so N(i) holds both the chosen neighbors and the associates of i. Per-node
/// class tallies over N(i) are cached for the uncertainty computations.
///
/// Deleting a node only touches the nodes that listed it (they pick up their
/// next-nearest alive node) and its own edges; the result is identical to a
/// fresh build over the survivors.
class NeighborhoodGraph {
public:
    using Index = std::uint32_t;

    /// `labels` is indexed by dataset row; `alive` (optional, by local index)
    /// restricts the build to a subset of the matrix.
    static NeighborhoodGraph build(const DistanceMatrix& matrix, std::span<const int> labels, int num_classes,
                                   int k, std::span<const std::uint8_t> alive = {});

    std::size_t size() const { return alive_.size(); }
    std::size_t alive_count() const { return alive_count_; }
    bool alive(std::size_t i) const { return alive_[i] != 0; }
    int k() const { return k_; }
    int num_classes() const { return num_classes_; }
    std::size_t edge_count() const { return edge_count_; }
    /// Sum of degrees, n.. = 2|E|.
    std::size_t degree_sum() const { return 2 * edge_count_; }

    int label(std::size_t i) const { return labels_[i]; }
    std::span<const Index> out_neighbors(std::size_t i) const { return out_[i]; }
    std::span<const Index> neighbors(std::size_t i) const { return adj_[i]; }
    std::size_t degree(std::size_t i) const { return adj_[i].size(); }
    std::span<const int> tallies(std::size_t i) const {
        return {tallies_.data() + i * static_cast<std::size_t>(num_classes_), static_cast<std::size_t>(num_classes_)};
    }
    /// Alive count per class.
    std::span<const std::size_t> class_counts() const { return class_counts_; }

    /// Nodes whose tallies (hence local uncertainty) change if `victim` is
    /// deleted: N(victim) plus the replacement neighbors that would be linked.
    std::vector<Index> affected_set(const DistanceMatrix& matrix, Index victim) const;

    /// Deletes `victim` and returns the affected set (sorted, without victim).
    /// Throws std::invalid_argument if fewer than two nodes would remain.
    std::vector<Index> remove_instance(const DistanceMatrix& matrix, Index victim);

    friend bool operator==(const NeighborhoodGraph& a, const NeighborhoodGraph& b);

private:
    // Next-nearest alive node for `i` outside its current list, ignoring `skip`.
    std::int64_t next_candidate(const DistanceMatrix& matrix, Index i, std::int64_t skip) const;
    void link(Index a, Index b);

    int k_ = 0;
    int num_classes_ = 0;
    std::vector<int> labels_;
    std::vector<std::uint8_t> alive_;
    std::size_t alive_count_ = 0;
    std::vector<std::vector<Index>> out_;
    std::vector<std::vector<Index>> adj_;
    std::vector<int> tallies_;
    std::vector<std::size_t> class_counts_;
    std::size_t edge_count_ = 0;
};

/// Debug dump, one undirected edge per line: "row_i row_j distance".
void write_edge_list(std::ostream& out, const NeighborhoodGraph& g, const DistanceMatrix& matrix);

}  // namespace rcg
