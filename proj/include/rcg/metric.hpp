#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcg/data_model.hpp"

namespace rcg {

/// Heterogeneous distance: range-normalized absolute difference on numeric
/// columns (capped at 1), overlap on categorical columns, Euclidean
/// aggregation. Ranges are frozen from a training mask.
class DistanceSpec {
public:
    DistanceSpec() = default;

    /// Freezes per-column ranges over the rows of `train`.
    static DistanceSpec fit(const Dataset& ds, const InstanceMask& train, bool normalize = true);

    double feature_difference(std::size_t col, double a, double b) const;

    std::size_t cols() const { return kinds_.size(); }
    bool normalized() const { return normalize_; }
    double low(std::size_t col) const { return low_[col]; }
    double span(std::size_t col) const { return span_[col]; }

private:
    std::vector<FeatureKind> kinds_;
    std::vector<double> low_;
    std::vector<double> span_;
    bool normalize_ = true;
};

/// Throws std::invalid_argument when `fmask` selects no column.
double distance(const Dataset& ds, std::size_t a, std::size_t b, const FeatureMask& fmask, const DistanceSpec& spec);

/// Distance from an external feature vector (length ds.cols()) to row `b`.
double distance(const Dataset& ds, std::span<const double> query, std::size_t b, const FeatureMask& fmask,
                const DistanceSpec& spec);

/// Dense symmetric distance matrix over a subset of rows. Local index i
/// refers to dataset row row_id(i); local order follows row order.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::size_t> rows, std::vector<double> data)
        : rows_(std::move(rows)), data_(std::move(data)) {}

    std::size_t size() const { return rows_.size(); }
    double at(std::size_t i, std::size_t j) const { return data_[i * rows_.size() + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * rows_.size(), rows_.size()}; }
    std::size_t row_id(std::size_t i) const { return rows_[i]; }
    std::span<const std::size_t> row_ids() const { return rows_; }

private:
    std::vector<std::size_t> rows_;
    std::vector<double> data_;
};

DistanceMatrix pairwise_matrix(const Dataset& ds, const InstanceMask& imask, const FeatureMask& fmask,
                               const DistanceSpec& spec);

}  // namespace rcg
