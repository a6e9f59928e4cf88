#include "rcg/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcg {

DistanceSpec DistanceSpec::fit(const Dataset& ds, const InstanceMask& train, bool normalize) {
    if (train.size() != ds.rows()) throw std::invalid_argument("training mask size does not match dataset");
    if (train.count() == 0) throw std::invalid_argument("cannot fit distance ranges on an empty training mask");

    DistanceSpec spec;
    spec.normalize_ = normalize;
    const std::size_t p = ds.cols();
    spec.kinds_.resize(p);
    spec.low_.assign(p, std::numeric_limits<double>::infinity());
    std::vector<double> high(p, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < p; ++j) spec.kinds_[j] = ds.feature(j).kind;
    for (std::size_t r : train.indices()) {
        for (std::size_t j = 0; j < p; ++j) {
            spec.low_[j] = std::min(spec.low_[j], ds.value(r, j));
            high[j] = std::max(high[j], ds.value(r, j));
        }
    }
    spec.span_.resize(p);
    for (std::size_t j = 0; j < p; ++j) spec.span_[j] = high[j] - spec.low_[j];
    return spec;
}

double DistanceSpec::feature_difference(std::size_t col, double a, double b) const {
    if (kinds_[col] == FeatureKind::categorical) return a == b ? 0.0 : 1.0;
    const double diff = std::abs(a - b);
    if (!normalize_) return diff;
    // A constant training column carries no geometry.
    if (span_[col] <= 0.0) return 0.0;
    return std::min(diff / span_[col], 1.0);
}

namespace {

void require_nonempty(const FeatureMask& fmask) {
    if (fmask.count() == 0) throw std::invalid_argument("distance over an empty feature mask");
}

double accumulate(const Dataset& ds, std::span<const double> a, std::size_t b,
                  std::span<const std::size_t> cols, const DistanceSpec& spec) {
    double sum = 0.0;
    for (std::size_t j : cols) {
        const double d = spec.feature_difference(j, a[j], ds.value(b, j));
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

double distance(const Dataset& ds, std::size_t a, std::size_t b, const FeatureMask& fmask, const DistanceSpec& spec) {
    return distance(ds, ds.row(a), b, fmask, spec);
}

double distance(const Dataset& ds, std::span<const double> query, std::size_t b, const FeatureMask& fmask,
                const DistanceSpec& spec) {
    require_nonempty(fmask);
    if (query.size() != ds.cols()) throw std::invalid_argument("query vector length does not match column count");
    const auto cols = fmask.indices();
    return accumulate(ds, query, b, cols, spec);
}

DistanceMatrix pairwise_matrix(const Dataset& ds, const InstanceMask& imask, const FeatureMask& fmask,
                               const DistanceSpec& spec) {
    require_nonempty(fmask);
    const auto rows = imask.indices();
    const auto cols = fmask.indices();
    const std::size_t m = rows.size();
    std::vector<double> data(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto a = ds.row(rows[i]);
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = accumulate(ds, a, rows[j], cols, spec);
            data[i * m + j] = d;
            data[j * m + i] = d;
        }
    }
    return DistanceMatrix(rows, std::move(data));
}

}  // namespace rcg
