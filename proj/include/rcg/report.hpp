#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcg/evaluation.hpp"
#include "rcg/reduction.hpp"

namespace rcg {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kResultsSchemaVersion = 1;

struct RunManifest {
    std::vector<std::string> command_line;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::string dataset_digest;  // sha256 of the input file bytes
    std::string tool_version = kToolVersion;
};

std::string sha256_hex(const std::filesystem::path& file);

nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const AlgorithmConfig& cfg);
nlohmann::json to_json(const SignificanceSpec& spec);
nlohmann::json to_json(const ReductionTrace& trace);
/// Timing is left out so identical runs serialize identically.
nlohmann::json to_json(const EvalResult& result);
nlohmann::json to_json(const ComparisonTable& table);

/// Line-oriented trace: one action per line, then the halt reason.
void write_trace_text(std::ostream& out, const ReductionTrace& trace);

}  // namespace rcg
