#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rcg/data_model.hpp"
#include "rcg/error.hpp"
#include "rcg/evaluation.hpp"
#include "rcg/knn_graph.hpp"
#include "rcg/random.hpp"
#include "rcg/reduction.hpp"
#include "rcg/report.hpp"

namespace rcg::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "RCGTOOL_OUT_DIR";

enum Exit { ok = 0, usage = 1, data = 2, degenerate = 3 };

struct Options {
    std::string data;
    std::string class_col;
    std::vector<std::string> categorical;
    std::vector<std::string> numeric;
    std::optional<int> k;
    std::optional<double> alpha;
    std::optional<double> epsilon;
    std::uint64_t seed = 1;
    std::string out;
    bool no_normalize = false;
    bool no_rollback = false;
    std::optional<std::size_t> min_alive;
    bool literal_min = false;
    bool final_centers_pass = false;

    // reduce
    std::string algo;
    std::string dump_graph;

    // eval / compare
    std::vector<std::string> algos;
    std::optional<int> cv;
    std::optional<double> holdout;
    std::optional<double> noise;
    bool unstratified = false;
    std::optional<int> classify_k;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--data", o.data, "Input CSV (header row, comma separated)")->required();
    sub->add_option("--class-col", o.class_col, "Name of the class column")->required();
    sub->add_option("--categorical", o.categorical, "Columns to treat as categorical")->delimiter(',');
    sub->add_option("--numeric", o.numeric, "Columns to treat as numeric")->delimiter(',');
    sub->add_option("--k", o.k, "Neighborhood size (default: 1 for fsrcg, 5 otherwise)")
        ->check(CLI::PositiveNumber);
    auto* alpha = sub->add_option("--alpha", o.alpha, "Chi-square significance level (default 0.05)")
                      ->check(CLI::Range(0.0, 1.0));
    auto* eps = sub->add_option("--epsilon", o.epsilon, "Use a fixed RCG margin instead of the chi-square test")
                    ->check(CLI::NonNegativeNumber);
    alpha->excludes(eps);
    sub->add_option("--seed", o.seed, "Root random seed")->capture_default_str();
    sub->add_option("--out", o.out, std::string("Output directory (default $") + kOutDirEnv + " or ./rcg_out)");
    sub->add_flag("--no-normalize", o.no_normalize, "Use raw numeric differences");
    sub->add_flag("--no-rollback", o.no_rollback, "Keep the deletion that stops border pruning");
    sub->add_option("--min-alive", o.min_alive, "Instance floor (default max(c, k + 2))");
    sub->add_flag("--literal-min", o.literal_min, "Backward elimination picks the minimum-RCG candidate");
    sub->add_flag("--final-centers-pass", o.final_centers_pass, "Run the (k+1)-NN sweep after fsps border pruning");
}

void add_experiment(CLI::App* sub, Options& o) {
    auto* cv = sub->add_option("--cv", o.cv, "k-fold cross-validation (default 5)")->check(CLI::Range(2, 1000000));
    auto* holdout = sub->add_option("--holdout", o.holdout, "Single holdout test fraction, e.g. 0.3333")
                        ->check(CLI::Range(0.0, 1.0));
    cv->excludes(holdout);
    sub->add_option("--noise", o.noise, "Fraction of training labels to corrupt")->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--unstratified", o.unstratified, "Draw splits without class stratification");
    sub->add_option("--classify-k", o.classify_k, "k of the evaluating kNN classifier (default: --k or 5)")
        ->check(CLI::PositiveNumber);
}

AlgorithmConfig algorithm_config(const Options& o) {
    AlgorithmConfig cfg;
    cfg.k = o.k;
    if (o.epsilon) cfg.significance = EpsilonMargin{*o.epsilon};
    else cfg.significance = ChiSquare{o.alpha.value_or(0.05)};
    cfg.rollback_last_deletion = !o.no_rollback;
    cfg.min_alive = o.min_alive;
    cfg.normalize = !o.no_normalize;
    cfg.literal_min_selection = o.literal_min;
    cfg.final_centers_pass = o.final_centers_pass;
    return cfg;
}

Dataset load(const Options& o) {
    KindOverrides overrides;
    for (const auto& c : o.categorical) overrides[c] = FeatureKind::categorical;
    for (const auto& c : o.numeric) overrides[c] = FeatureKind::numeric;
    return load_csv(o.data, o.class_col, overrides);
}

fs::path output_dir(const Options& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "rcg_out";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot write '" + path.string() + "'");
    f << content;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

RunManifest manifest(const Options& o, const std::vector<std::string>& command_line, nlohmann::json config) {
    RunManifest m;
    m.command_line = command_line;
    m.seed = o.seed;
    m.config = std::move(config);
    m.dataset_digest = sha256_hex(o.data);
    return m;
}

SplitScheme split_scheme(const Options& o) {
    const std::uint64_t seed = substream_seed(o.seed, "split");
    if (o.holdout) return Holdout{*o.holdout, seed, !o.unstratified};
    return KFold{o.cv.value_or(5), seed, !o.unstratified};
}

ExperimentConfig experiment_config(const Options& o, Algorithm algorithm) {
    ExperimentConfig cfg;
    cfg.algorithm = algorithm;
    cfg.scheme = split_scheme(o);
    cfg.reduction = algorithm_config(o);
    cfg.classify_k = o.classify_k.value_or(o.k.value_or(5));
    if (o.noise) cfg.noise = NoiseSpec{*o.noise, substream_seed(o.seed, "noise")};
    return cfg;
}

nlohmann::json experiment_json(const ExperimentConfig& cfg) {
    nlohmann::json j = {{"split", describe(cfg.scheme)},
                        {"reduction", to_json(cfg.reduction)},
                        {"classify_k", cfg.classify_k}};
    j["noise"] = cfg.noise ? nlohmann::json{{"fraction", cfg.noise->fraction}, {"seed", cfg.noise->seed}}
                           : nlohmann::json(nullptr);
    return j;
}

int cmd_reduce(const Options& o, const std::vector<std::string>& command_line, std::ostream& out) {
    const auto algorithm = *parse_algorithm(o.algo);
    const Dataset ds = load(o);
    const auto cfg = algorithm_config(o);
    const auto train = InstanceMask::all(ds.rows());
    const auto result = reduce(ds, train, algorithm, cfg);

    const fs::path dir = output_dir(o);
    fs::create_directories(dir);

    std::ostringstream csv;
    write_csv(csv, ds, result.instances, result.features);
    write_file(dir / "reduced.csv", csv.str());

    std::ostringstream trace;
    write_trace_text(trace, result.trace);
    write_file(dir / "trace.txt", trace.str());

    const auto m = manifest(o, command_line, {{"command", "reduce"}, {"algorithm", o.algo}, {"reduction", to_json(cfg)}});
    nlohmann::json names = nlohmann::json::array();
    for (auto j : result.features.indices()) names.push_back(ds.feature(j).name);
    const nlohmann::json report = {{"schema_version", kResultsSchemaVersion},
                                   {"command", "reduce"},
                                   {"manifest", to_json(m)},
                                   {"rows", ds.rows()},
                                   {"columns", ds.cols()},
                                   {"retained_rows", result.instances.indices()},
                                   {"selected_features", result.features.indices()},
                                   {"selected_feature_names", names},
                                   {"trace", to_json(result.trace)}};
    write_file(dir / "report.json", dump(report));
    write_file(dir / "manifest.json", dump(to_json(m)));

    if (!o.dump_graph.empty()) {
        const int k = algorithm == Algorithm::fsrcg ? cfg.k_for_feature_selection() : cfg.k_for_prototype_selection();
        const auto spec = DistanceSpec::fit(ds, train, cfg.normalize);
        const auto matrix = pairwise_matrix(ds, result.instances, result.features, spec);
        const auto g = NeighborhoodGraph::build(matrix, ds.labels(), ds.classes(), k);
        std::ostringstream edges;
        write_edge_list(edges, g, matrix);
        write_file(o.dump_graph, edges.str());
    }

    out << result.trace.algorithm << ": kept " << result.instances.count() << "/" << ds.rows() << " instances, "
        << result.features.count() << "/" << ds.cols() << " features\n";
    out << "halt: " << result.trace.halt_reason << "\n";
    out << "wrote " << (dir / "reduced.csv").string() << ", trace.txt, report.json, manifest.json\n";
    return ok;
}

int cmd_eval(const Options& o, const std::vector<std::string>& command_line, std::ostream& out,
             std::ostream& err) {
    const auto algorithm = parse_algorithm(o.algo);
    if (!algorithm) {
        err << "unknown algorithm '" << o.algo << "'\n";
        return usage;
    }
    const Dataset ds = load(o);
    const auto cfg = experiment_config(o, *algorithm);
    const auto result = run_experiment(ds, cfg);

    const fs::path dir = output_dir(o);
    fs::create_directories(dir);
    const auto m = manifest(o, command_line, {{"command", "eval"}, {"algorithm", o.algo}, {"experiment", experiment_json(cfg)}});
    const nlohmann::json doc = {{"schema_version", kResultsSchemaVersion},
                                {"command", "eval"},
                                {"manifest", to_json(m)},
                                {"results", nlohmann::json::array({to_json(result)})}};
    write_file(dir / "results.json", dump(doc));

    print_summary_row(out, result);
    out << "runtime_ms " << static_cast<long long>(result.runtime_ms) << "\n";
    return ok;
}

int cmd_compare(const Options& o, const std::vector<std::string>& command_line, std::ostream& out,
                std::ostream& err) {
    std::vector<Algorithm> algorithms;
    for (const auto& name : o.algos) {
        const auto a = parse_algorithm(name);
        if (!a) {
            err << "unknown algorithm '" << name << "'\n";
            return usage;
        }
        algorithms.push_back(*a);
    }
    if (algorithms.empty()) {
        err << "--algos needs at least one algorithm\n";
        return usage;
    }
    const Dataset ds = load(o);
    std::vector<EvalResult> results;
    nlohmann::json configs = nlohmann::json::array();
    for (auto a : algorithms) {
        const auto cfg = experiment_config(o, a);
        results.push_back(run_experiment(ds, cfg));
        configs.push_back(experiment_json(cfg));
    }
    const auto table = compare_table(results);

    const fs::path dir = output_dir(o);
    fs::create_directories(dir);
    nlohmann::json result_docs = nlohmann::json::array();
    for (const auto& r : results) result_docs.push_back(to_json(r));
    const auto m = manifest(o, command_line, {{"command", "compare"}, {"algorithms", o.algos}, {"experiments", configs}});
    const nlohmann::json doc = {{"schema_version", kResultsSchemaVersion},
                                {"command", "compare"},
                                {"manifest", to_json(m)},
                                {"results", std::move(result_docs)},
                                {"comparison", to_json(table)}};
    write_file(dir / "results.json", dump(doc));

    print_table(out, table);
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint feature and prototype pruning for kNN classification", "rcgtool"};
    app.require_subcommand(1);
    Options o;

    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a dataset and write the surviving rows and columns");
    add_common(reduce_cmd, o);
    reduce_cmd->add_option("--algo", o.algo, "Reduction algorithm")
        ->required()
        ->check(CLI::IsMember({"fsrcg", "psrcg", "fsps", "cnn", "rnn"}));
    reduce_cmd->add_option("--dump-graph", o.dump_graph, "Write the final kNN graph as an edge list");

    auto* eval_cmd = app.add_subcommand("eval", "Cross-validate one reduction followed by kNN classification");
    add_common(eval_cmd, o);
    add_experiment(eval_cmd, o);
    eval_cmd->add_option("--algo", o.algo, "Reduction algorithm or 'none'")->required();

    auto* compare_cmd = app.add_subcommand("compare", "Evaluate several reductions on shared splits");
    add_common(compare_cmd, o);
    add_experiment(compare_cmd, o);
    compare_cmd->add_option("--algos", o.algos, "Comma separated algorithm names")->required()->delimiter(',');

    std::vector<std::string> command_line{"rcgtool"};
    for (int i = 1; i < argc; ++i) command_line.emplace_back(argv[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return ok;
    } catch (const CLI::ParseError& e) {
        const auto subs = app.get_subcommands();
        err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
        return usage;
    }

    try {
        if (reduce_cmd->parsed()) return cmd_reduce(o, command_line, out);
        if (eval_cmd->parsed()) return cmd_eval(o, command_line, out, err);
        return cmd_compare(o, command_line, out, err);
    } catch (const degenerate_error& e) {
        err << "error: " << e.what() << "\n";
        return degenerate;
    } catch (const data_error& e) {
        err << "error: " << e.what() << "\n";
        return data;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return data;
    }
}

}  // namespace rcg::cli
