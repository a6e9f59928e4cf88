#include "rcg/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>

#include "rcg/error.hpp"

namespace rcg {

std::string sha256_hex(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw data_error("cannot open '" + file.string() + "' for hashing");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

nlohmann::json to_json(const RunManifest& m) {
    return {{"command_line", m.command_line},
            {"seed", m.seed},
            {"config", m.config},
            {"dataset_digest", m.dataset_digest},
            {"tool_version", m.tool_version}};
}

nlohmann::json to_json(const SignificanceSpec& spec) {
    if (const auto* chi = std::get_if<ChiSquare>(&spec)) return {{"mode", "chi_square"}, {"alpha", chi->alpha}};
    return {{"mode", "epsilon_margin"}, {"epsilon", std::get<EpsilonMargin>(spec).epsilon}};
}

nlohmann::json to_json(const AlgorithmConfig& cfg) {
    nlohmann::json j = {{"significance", to_json(cfg.significance)},
                        {"rollback_last_deletion", cfg.rollback_last_deletion},
                        {"normalize", cfg.normalize},
                        {"literal_min_selection", cfg.literal_min_selection},
                        {"final_centers_pass", cfg.final_centers_pass}};
    j["k"] = cfg.k ? nlohmann::json(*cfg.k) : nlohmann::json("default");
    j["min_alive"] = cfg.min_alive ? nlohmann::json(*cfg.min_alive) : nlohmann::json("default");
    return j;
}

nlohmann::json to_json(const ReductionTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"action", std::string(to_string(s.kind))},
                         {"targets", s.targets},
                         {"rcg_before", s.rcg_before},
                         {"rcg_after", s.rcg_after},
                         {"alive_count", s.alive_count},
                         {"selected_count", s.selected_count}});
    return {{"algorithm", trace.algorithm},
            {"steps", std::move(steps)},
            {"halt_reason", trace.halt_reason},
            {"graph_builds", trace.graph_builds}};
}

nlohmann::json to_json(const EvalResult& r) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.per_fold)
        folds.push_back({{"fold", f.fold},
                         {"train_size", f.train_size},
                         {"test_size", f.test_size},
                         {"noisy_labels", f.noisy_labels},
                         {"retained_instances", f.retained_instances},
                         {"retained_features", f.retained_features},
                         {"selected_features", f.selected_features},
                         {"correct", f.correct},
                         {"accuracy", f.accuracy},
                         {"graph_builds", f.graph_builds}});
    return {{"algorithm", r.algorithm},
            {"split", r.split_signature},
            {"total_features", r.total_features},
            {"accuracy", r.accuracy},
            {"retained_instances_pct", r.retained_instances_pct},
            {"retained_features_pct", r.retained_features_pct},
            {"size_times_dim_pct", r.size_times_dim_pct},
            {"graph_builds", r.graph_builds},
            {"per_fold", std::move(folds)}};
}

nlohmann::json to_json(const ComparisonTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"algorithm", r.algorithm},
                        {"size_pct", r.size_pct},
                        {"dim_pct", r.dim_pct},
                        {"size_times_dim_pct", r.size_times_dim_pct},
                        {"accuracy", r.accuracy}});
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : table.tests)
        tests.push_back({{"first", t.first},
                         {"second", t.second},
                         {"t", t.test.t},
                         {"df", t.test.df},
                         {"mean_difference", t.test.mean_difference},
                         {"p_two_sided", t.test.p_two_sided},
                         {"p_one_sided", t.test.p_one_sided}});
    return {{"split", table.split_signature}, {"rows", std::move(rows)}, {"paired_t_tests", std::move(tests)}};
}

void write_trace_text(std::ostream& out, const ReductionTrace& trace) {
    out << "algorithm " << trace.algorithm << '\n';
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        char rcg[96];
        std::snprintf(rcg, sizeof rcg, "rcg %.9f -> %.9f", s.rcg_before, s.rcg_after);
        out << "step " << i << ' ' << to_string(s.kind) << " [";
        for (std::size_t t = 0; t < s.targets.size(); ++t) out << (t ? " " : "") << s.targets[t];
        out << "] " << rcg << " alive " << s.alive_count << " selected " << s.selected_count << '\n';
    }
    out << "graph_builds " << trace.graph_builds << '\n';
    out << "halt " << trace.halt_reason << '\n';
}

}  // namespace rcg
