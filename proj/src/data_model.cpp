#include "rcg/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rcg/error.hpp"

namespace rcg {

Dataset::Dataset(std::vector<FeatureMeta> features, std::vector<double> values, std::vector<int> labels,
                 std::vector<std::string> class_names, std::string class_column)
    : features_(std::move(features)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      class_column_(std::move(class_column)) {
    const std::size_t n = labels_.size();
    const std::size_t p = features_.size();
    if (p < 1) throw data_error("dataset needs at least one feature column");
    if (n < 2) throw data_error("dataset needs at least two rows, got " + std::to_string(n));
    if (values_.size() != n * p) throw data_error("value matrix does not match rows x columns");
    if (class_names_.size() < 2)
        throw degenerate_error("c >= 2 violated (" + std::to_string(class_names_.size()) + " distinct class)");
    const int c = static_cast<int>(class_names_.size());
    for (int y : labels_)
        if (y < 0 || y >= c) throw data_error("label id out of range");
    for (std::size_t j = 0; j < p; ++j) {
        const auto& f = features_[j];
        if (f.kind == FeatureKind::numeric) {
            if (!(f.min <= f.max)) throw data_error("column '" + f.name + "' has min > max");
            continue;
        }
        const auto card = static_cast<double>(f.categories.size());
        for (std::size_t i = 0; i < n; ++i) {
            const double v = values_[i * p + j];
            if (v < 0 || v >= card || v != std::floor(v))
                throw data_error("column '" + f.name + "' holds a value outside its dictionary");
        }
    }
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
    return Dataset(features_, values_, std::move(labels), class_names_, class_column_);
}

namespace {

using Record = std::vector<std::string>;

// RFC 4180 records; quoted fields may contain commas, doubled quotes and
// line breaks. Unquoted fields are trimmed of surrounding blanks.
std::vector<Record> parse_records(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);

    std::vector<Record> records;
    Record current;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    bool record_has_content = false;

    auto trim = [](std::string& s) {
        const auto first = s.find_first_not_of(" \t");
        if (first == std::string::npos) {
            s.clear();
            return;
        }
        s = s.substr(first, s.find_last_not_of(" \t") - first + 1);
    };
    auto end_field = [&] {
        if (!was_quoted) trim(field);
        current.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (record_has_content) records.push_back(std::move(current));
        current.clear();
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                quoted = true;
                was_quoted = true;
                record_has_content = true;
                field.clear();
                break;
            case ',':
                record_has_content = true;
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                break;
            default:
                if (ch != ' ' && ch != '\t') record_has_content = true;
                field.push_back(ch);
        }
    }
    if (quoted) throw data_error("unterminated quoted field");
    end_record();
    return records;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "?"; }

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_field(std::ostream& out, const std::string& s) {
    const bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos ||
                              (!s.empty() && (s.front() == ' ' || s.back() == ' '));
    if (!needs_quotes) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"') out << '"';
        out << ch;
    }
    out << '"';
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& class_column, const KindOverrides& overrides) {
    auto records = parse_records(in);
    if (records.empty()) throw data_error("empty CSV: no header row");
    const Record header = std::move(records.front());
    records.erase(records.begin());
    if (records.empty()) throw data_error("empty dataset: header only");

    const auto class_it = std::find(header.begin(), header.end(), class_column);
    if (class_it == header.end()) throw data_error("class column '" + class_column + "' not found in header");
    const auto class_idx = static_cast<std::size_t>(class_it - header.begin());

    for (const auto& [name, kind] : overrides) {
        if (name == class_column) throw data_error("cannot override the kind of the class column");
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw data_error("kind override names unknown column '" + name + "'");
    }

    const std::size_t width = header.size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width)
            throw data_error("ragged row " + std::to_string(r + 2) + ": expected " + std::to_string(width) +
                             " fields, got " + std::to_string(records[r].size()));
        for (std::size_t j = 0; j < width; ++j)
            if (is_missing(records[r][j]))
                throw data_error("missing value in column '" + header[j] + "' at row " + std::to_string(r + 2));
    }

    const std::size_t n = records.size();
    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < width; ++j)
        if (j != class_idx) feature_cols.push_back(j);
    const std::size_t p = feature_cols.size();

    std::vector<FeatureMeta> features(p);
    std::vector<double> values(n * p);
    for (std::size_t f = 0; f < p; ++f) {
        const std::size_t j = feature_cols[f];
        FeatureMeta& meta = features[f];
        meta.name = header[j];

        std::vector<double> parsed(n);
        bool all_numeric = true;
        for (std::size_t r = 0; r < n && all_numeric; ++r) {
            auto v = parse_number(records[r][j]);
            if (v) parsed[r] = *v;
            else all_numeric = false;
        }
        meta.kind = all_numeric ? FeatureKind::numeric : FeatureKind::categorical;
        if (auto it = overrides.find(meta.name); it != overrides.end()) {
            if (it->second == FeatureKind::numeric && !all_numeric)
                throw data_error("column '" + meta.name + "' declared numeric but holds non-numeric values");
            meta.kind = it->second;
        }

        if (meta.kind == FeatureKind::numeric) {
            meta.min = *std::min_element(parsed.begin(), parsed.end());
            meta.max = *std::max_element(parsed.begin(), parsed.end());
            for (std::size_t r = 0; r < n; ++r) values[r * p + f] = parsed[r];
        } else {
            std::unordered_map<std::string, std::size_t> index;
            for (std::size_t r = 0; r < n; ++r) {
                const auto& cell = records[r][j];
                auto [it, inserted] = index.try_emplace(cell, meta.categories.size());
                if (inserted) meta.categories.push_back(cell);
                values[r * p + f] = static_cast<double>(it->second);
            }
        }
    }

    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_index;
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = records[r][class_idx];
        auto [it, inserted] = class_index.try_emplace(cell, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(cell);
        labels[r] = it->second;
    }

    return Dataset(std::move(features), std::move(values), std::move(labels), std::move(class_names), class_column);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& class_column, const KindOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    return read_csv(in, class_column, overrides);
}

void write_csv(std::ostream& out, const Dataset& ds, const InstanceMask& rows, const FeatureMask& cols) {
    const auto col_ids = cols.indices();
    for (std::size_t j : col_ids) {
        write_field(out, ds.feature(j).name);
        out << ',';
    }
    write_field(out, ds.class_column());
    out << '\n';
    for (std::size_t r : rows.indices()) {
        for (std::size_t j : col_ids) {
            const auto& meta = ds.feature(j);
            if (meta.kind == FeatureKind::numeric)
                out << format_number(ds.value(r, j));
            else
                write_field(out, meta.categories[static_cast<std::size_t>(ds.value(r, j))]);
            out << ',';
        }
        write_field(out, ds.class_names()[static_cast<std::size_t>(ds.label(r))]);
        out << '\n';
    }
}

void write_csv(std::ostream& out, const Dataset& ds) {
    write_csv(out, ds, InstanceMask::all(ds.rows()), FeatureMask::all(ds.cols()));
}

std::size_t rounded_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::round(fraction * static_cast<double>(n)));
}

Dataset inject_label_noise(const Dataset& ds, const NoiseSpec& spec) {
    return inject_label_noise(ds, spec, InstanceMask::all(ds.rows()));
}

Dataset inject_label_noise(const Dataset& ds, const NoiseSpec& spec, const InstanceMask& eligible) {
    if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
        throw std::invalid_argument("noise fraction must lie in [0, 1]");
    if (eligible.size() != ds.rows()) throw std::invalid_argument("noise mask size does not match dataset");

    auto rows = eligible.indices();
    const std::size_t count = rounded_count(spec.fraction, rows.size());
    std::mt19937_64 rng(spec.seed);
    std::shuffle(rows.begin(), rows.end(), rng);

    std::vector<int> labels(ds.labels().begin(), ds.labels().end());
    std::uniform_int_distribution<int> other(0, ds.classes() - 2);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t r = rows[i];
        const int drawn = other(rng);
        labels[r] = drawn < labels[r] ? drawn : drawn + 1;
    }
    return ds.with_labels(std::move(labels));
}

namespace {

std::vector<std::vector<std::size_t>> shuffled_by_class(const Dataset& ds, std::mt19937_64& rng) {
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(ds.classes()));
    for (std::size_t r = 0; r < ds.rows(); ++r) groups[static_cast<std::size_t>(ds.label(r))].push_back(r);
    for (auto& g : groups) std::shuffle(g.begin(), g.end(), rng);
    return groups;
}

std::vector<FoldMasks> kfold_split(const Dataset& ds, const KFold& s) {
    const std::size_t n = ds.rows();
    if (s.folds < 2) throw std::invalid_argument("k-fold split needs at least 2 folds");
    if (static_cast<std::size_t>(s.folds) > n)
        throw std::invalid_argument("fold count " + std::to_string(s.folds) + " exceeds row count " +
                                    std::to_string(n));
    std::mt19937_64 rng(s.seed);
    std::vector<std::size_t> order;
    if (s.stratified) {
        for (auto& g : shuffled_by_class(ds, rng)) order.insert(order.end(), g.begin(), g.end());
    } else {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
    }

    const auto k = static_cast<std::size_t>(s.folds);
    std::vector<FoldMasks> out(k, FoldMasks{InstanceMask::all(n), InstanceMask::none(n)});
    for (std::size_t pos = 0; pos < n; ++pos) {
        auto& fold = out[pos % k];
        fold.test.set(order[pos]);
        fold.train.reset(order[pos]);
    }
    return out;
}

std::vector<FoldMasks> holdout_split(const Dataset& ds, const Holdout& s) {
    const std::size_t n = ds.rows();
    if (!(s.test_fraction > 0.0 && s.test_fraction < 1.0))
        throw std::invalid_argument("holdout test fraction must lie in (0, 1)");
    const std::size_t test_n = rounded_count(s.test_fraction, n);
    if (test_n == 0 || test_n >= n) throw std::invalid_argument("holdout split leaves an empty train or test set");

    std::mt19937_64 rng(s.seed);
    FoldMasks fold{InstanceMask::all(n), InstanceMask::none(n)};
    auto take = [&](std::size_t r) {
        fold.test.set(r);
        fold.train.reset(r);
    };

    if (!s.stratified) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < test_n; ++i) take(order[i]);
        return {fold};
    }

    // Largest-remainder allocation of the test quota across classes.
    auto groups = shuffled_by_class(ds, rng);
    std::vector<std::size_t> quota(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const double exact = s.test_fraction * static_cast<double>(groups[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < test_n && i < remainders.size(); ++i) {
        const std::size_t c = remainders[i].second;
        if (quota[c] < groups[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }
    for (std::size_t c = 0; c < groups.size(); ++c)
        for (std::size_t i = 0; i < quota[c]; ++i) take(groups[c][i]);
    return {fold};
}

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<FoldMasks> split(const Dataset& ds, const SplitScheme& scheme) {
    return std::visit(
        [&](const auto& s) -> std::vector<FoldMasks> {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, KFold>)
                return kfold_split(ds, s);
            else
                return holdout_split(ds, s);
        },
        scheme);
}

std::string describe(const SplitScheme& scheme) {
    return std::visit(
        [](const auto& s) -> std::string {
            const std::string strat = s.stratified ? "stratified" : "unstratified";
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, KFold>)
                return "kfold(" + std::to_string(s.folds) + "," + strat + ",seed=" + std::to_string(s.seed) + ")";
            else
                return "holdout(" + shortest(s.test_fraction) + "," + strat + ",seed=" + std::to_string(s.seed) + ")";
        },
        scheme);
}

}  // namespace rcg
