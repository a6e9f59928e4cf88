#pragma once

#include <stdexcept>
#include <string>

namespace rcg {

/// Malformed or unusable input data (bad CSV, missing values, ragged rows).
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The class distribution leaves the relative certainty gain undefined
/// (fewer than two classes present, so the prior uncertainty is zero).
class degenerate_error : public data_error {
public:
    explicit degenerate_error(const std::string& detail)
        : data_error("degenerate class distribution: " + detail) {}
};

}  // namespace rcg
