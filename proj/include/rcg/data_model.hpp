#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rcg {

enum class FeatureKind { numeric, categorical };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    // Observed over all rows; only meaningful for numeric columns.
    double min = 0.0;
    double max = 0.0;
    // Categorical values are stored as indices into this dictionary.
    std::vector<std::string> categories;

    friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

/// Immutable labeled table. Values are row-major doubles; categorical cells
/// hold the dictionary index of their category.
class Dataset {
public:
    Dataset(std::vector<FeatureMeta> features, std::vector<double> values, std::vector<int> labels,
            std::vector<std::string> class_names, std::string class_column);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return features_.size(); }
    int classes() const { return static_cast<int>(class_names_.size()); }

    double value(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols(), cols()};
    }
    int label(std::size_t r) const { return labels_[r]; }
    std::span<const int> labels() const { return labels_; }

    const FeatureMeta& feature(std::size_t col) const { return features_[col]; }
    std::span<const FeatureMeta> features() const { return features_; }
    std::span<const std::string> class_names() const { return class_names_; }
    const std::string& class_column() const { return class_column_; }

    /// Same table with the labels replaced.
    Dataset with_labels(std::vector<int> labels) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<FeatureMeta> features_;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
    std::string class_column_;
};

/// Boolean selection over rows or columns with a cached population count.
template <typename Tag>
class Mask {
public:
    Mask() = default;
    explicit Mask(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0), count_(value ? n : 0) {}

    static Mask all(std::size_t n) { return Mask(n, true); }
    static Mask none(std::size_t n) { return Mask(n, false); }

    std::size_t size() const { return bits_.size(); }
    std::size_t count() const { return count_; }
    bool test(std::size_t i) const { return bits_[i] != 0; }

    void set(std::size_t i, bool value = true) {
        const std::uint8_t v = value ? 1 : 0;
        if (bits_[i] == v) return;
        bits_[i] = v;
        value ? ++count_ : --count_;
    }
    void reset(std::size_t i) { set(i, false); }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(count_);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(i);
        return out;
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::vector<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

struct InstanceTag {};
struct FeatureTag {};
using InstanceMask = Mask<InstanceTag>;
using FeatureMask = Mask<FeatureTag>;

struct NoiseSpec {
    double fraction = 0.1;
    std::uint64_t seed = 0;
};

using KindOverrides = std::map<std::string, FeatureKind>;

/// Parses an RFC 4180 CSV with a header row. Columns whose every cell parses
/// as a number are numeric unless overridden. Throws data_error on malformed
/// input and degenerate_error when fewer than two classes appear.
Dataset read_csv(std::istream& in, const std::string& class_column, const KindOverrides& overrides = {});
Dataset load_csv(const std::filesystem::path& path, const std::string& class_column,
                 const KindOverrides& overrides = {});

/// Writes the selected rows and columns followed by the class column.
void write_csv(std::ostream& out, const Dataset& ds, const InstanceMask& rows, const FeatureMask& cols);
void write_csv(std::ostream& out, const Dataset& ds);

/// Relabels exactly round(fraction * n) rows (half away from zero), each to
/// a uniformly chosen different class.
Dataset inject_label_noise(const Dataset& ds, const NoiseSpec& spec);
/// As above but draws only among the rows of `eligible`, with n = eligible.count().
Dataset inject_label_noise(const Dataset& ds, const NoiseSpec& spec, const InstanceMask& eligible);

struct KFold {
    int folds = 5;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct Holdout {
    double test_fraction = 1.0 / 3.0;
    std::uint64_t seed = 0;
    bool stratified = true;
};

using SplitScheme = std::variant<KFold, Holdout>;

struct FoldMasks {
    InstanceMask train;
    InstanceMask test;
};

std::vector<FoldMasks> split(const Dataset& ds, const SplitScheme& scheme);

/// Compact identity of a split scheme, e.g. "kfold(5,stratified,seed=7)".
std::string describe(const SplitScheme& scheme);

/// Half-away-from-zero rounding of fraction * n.
std::size_t rounded_count(double fraction, std::size_t n);

}  // namespace rcg
