// Command-line front end: path extraction, model fitting, centrality
// scores, and the out-of-sample ranking experiment.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 resource
// budget exceeded or write failure, 4 unsupported measure/model
// combination, 1 any other failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "pathcent/centrality.hpp"
#include "pathcent/errors.hpp"
#include "pathcent/experiment.hpp"
#include "pathcent/mogen.hpp"
#include "pathcent/network_model.hpp"
#include "pathcent/path_data.hpp"
#include "pathcent/text.hpp"

namespace {

using namespace pathcent;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitResource = 3;
constexpr int kExitUnsupported = 4;

std::string read_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + file);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Writes the payload to the output file, or stdout when none is given.
void write_payload(const std::string& output, const std::string& payload) {
    if (output.empty()) {
        std::cout << payload;
        if (!std::cout) throw ResourceError("failed writing to standard output");
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw ResourceError("cannot open " + output + " for writing");
    out << payload;
    if (!out) throw ResourceError("failed writing " + output);
}

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output;
    std::string format = "tsv";
};

std::string centrality_payload(const CentralityVector& vec, const std::string& format,
                               const std::string& model_text, int max_order) {
    if (format == "tsv") return to_tsv(vec);
    nlohmann::ordered_json root;
    root["command"] = "centrality";
    root["model"] = model_text;
    if (model_text == "mogen") root["max_order"] = max_order;
    root["measure"] = measure_name(vec.measure);
    root["order"] = vec.order;
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (const auto& [state, score] : vec.scores) scores[state] = score;
    root["scores"] = std::move(scores);
    return root.dump(2) + "\n";
}

int cmd_extract(const GlobalOptions& global, const std::string& temporal_file,
                std::int64_t delta, std::optional<std::uint64_t> max_paths) {
    const TemporalNetwork net = parse_temporal_csv(read_file(temporal_file));
    const PathDataset ds = extract_paths(net, delta, max_paths);
    write_payload(global.output, to_path_file(ds));
    std::cerr << "total paths\t" << ds.total_paths() << "\n"
              << "unique paths\t" << ds.unique_paths() << "\n"
              << "mean length\t" << text::format_double(ds.mean_length()) << "\n"
              << "median length\t" << text::format_double(ds.median_length()) << "\n";
    return kExitOk;
}

int cmd_fit(const GlobalOptions& global, const std::string& paths_file, int order,
            const std::string& model_out) {
    const PathDataset ds = parse_path_file(read_file(paths_file));
    const MogenModel model = fit_mogen(ds, order);
    const std::string payload = to_json(model);
    write_payload(model_out.empty() ? global.output : model_out, payload);
    return kExitOk;
}

int cmd_centrality(const GlobalOptions& global, const std::string& paths_file,
                   const std::string& model_text, int order, const std::string& measure_text,
                   int gt_order, const std::string& direction_text) {
    const PathDataset ds = parse_path_file(read_file(paths_file));
    const Measure measure = parse_measure(measure_text);
    const Direction direction =
        direction_text == "in" ? Direction::in : Direction::out;

    CentralityVector vec;
    if (model_text == "network") {
        vec = compute_measure(build_network(ds), measure, direction);
    } else if (model_text == "path") {
        vec = compute_measure(ds, measure, gt_order, direction);
    } else if (model_text == "mogen") {
        const MogenModel model = fit_mogen(ds, order);
        const FundamentalMatrix f = fundamental_matrix(model);
        vec = compute_measure(model, f, measure, gt_order, direction);
    } else {
        throw ArgumentError("unknown model '" + model_text + "'");
    }
    write_payload(global.output, centrality_payload(vec, global.format, model_text, order));
    return kExitOk;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& error) {
        throw ParseError(std::string("invalid experiment config: ") + error.what());
    }
    try {
        if (!root.is_object()) throw ParseError("invalid experiment config: not an object");
        ExperimentConfig config;
        if (root.contains("measures")) {
            config.measures.clear();
            for (const auto& entry : root.at("measures")) {
                config.measures.push_back(parse_measure(entry.get<std::string>()));
            }
        }
        if (root.contains("models")) {
            config.models.clear();
            for (const auto& entry : root.at("models")) {
                config.models.push_back(parse_model_label(entry.get<std::string>()));
            }
        }
        if (root.contains("train_fraction")) {
            config.train_fraction = root.at("train_fraction").get<double>();
        }
        if (root.contains("ground_truth_order")) {
            config.ground_truth_order = root.at("ground_truth_order").get<int>();
        }
        if (root.contains("repetitions")) {
            config.repetitions = root.at("repetitions").get<std::uint32_t>();
        }
        if (root.contains("top_fraction")) {
            config.top_fraction = root.at("top_fraction").get<double>();
        }
        if (root.contains("seed")) config.seed = root.at("seed").get<std::uint64_t>();
        return config;
    } catch (const nlohmann::json::exception& error) {
        throw ParseError(std::string("invalid experiment config: ") + error.what());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& part : text::split(text, ',')) {
        const auto trimmed = text::trim(part);
        if (!trimmed.empty()) out.emplace_back(trimmed);
    }
    return out;
}

int cmd_experiment(const GlobalOptions& global, const std::string& paths_file,
                   const std::string& config_file, const std::string& measures_csv,
                   const std::string& models_csv, std::optional<double> train_fraction,
                   std::optional<int> gt_order, std::optional<std::uint32_t> repetitions,
                   std::optional<double> top_fraction, bool seed_given) {
    ExperimentConfig config;
    if (!config_file.empty()) {
        config = experiment_config_from_json(read_file(config_file));
    }
    // Flags override config fields; defaults fill whatever remains.
    if (!measures_csv.empty()) {
        config.measures.clear();
        for (const auto& name : split_list(measures_csv)) {
            config.measures.push_back(parse_measure(name));
        }
    }
    if (!models_csv.empty()) {
        config.models.clear();
        for (const auto& label : split_list(models_csv)) {
            config.models.push_back(parse_model_label(label));
        }
    }
    if (config.measures.empty()) config.measures = all_measures();
    if (config.models.empty()) {
        config.models.push_back({ModelKind::network, 1});
        for (int k = 1; k <= 5; ++k) config.models.push_back({ModelKind::mogen, k});
        config.models.push_back({ModelKind::path, 1});
    }
    if (train_fraction) config.train_fraction = *train_fraction;
    if (gt_order) config.ground_truth_order = *gt_order;
    if (repetitions) config.repetitions = *repetitions;
    if (top_fraction) config.top_fraction = *top_fraction;
    if (seed_given) config.seed = global.seed;

    const PathDataset ds = parse_path_file(read_file(paths_file));
    const RankingReport report = run_experiment(ds, config, global.threads);

    write_payload(global.output,
                  global.format == "json" ? report_to_json(report) : report_to_tsv(report));

    if (report.invalid_repetitions.size() == config.repetitions) {
        std::cerr << "error: all " << config.repetitions << " repetitions failed\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-data models and centrality measures"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Seed for every randomized step");
    app.add_option("--threads", global.threads, "Worker threads for experiments")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--output", global.output, "Write the payload to this file instead of stdout");
    app.add_option("--format", global.format, "Payload format")
        ->check(CLI::IsMember({"tsv", "json"}));

    auto* extract = app.add_subcommand("extract", "Extract time-respecting paths from a temporal edge list");
    std::string temporal_file;
    std::int64_t delta = 1;
    std::uint64_t max_paths_value = 0;
    extract->add_option("--temporal", temporal_file, "CSV with header source,target,timestamp")
        ->required();
    extract->add_option("--delta", delta, "Maximum seconds between consecutive edges")
        ->required()
        ->check(CLI::PositiveNumber);
    auto* max_paths_opt =
        extract->add_option("--max-paths", max_paths_value, "Abort if more paths would be produced")
            ->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "Fit a multi-order model to a path file");
    std::string fit_paths;
    int fit_order = 1;
    std::string model_out;
    fit->add_option("--paths", fit_paths, "Path file")->required();
    fit->add_option("--order", fit_order, "Maximum model order K")->required();
    fit->add_option("--model-out", model_out, "Model JSON destination (defaults to --output)");

    auto* centrality = app.add_subcommand("centrality", "Compute a centrality measure");
    std::string cen_paths;
    std::string cen_model = "path";
    int cen_order = 1;
    std::string cen_measure;
    int cen_gt_order = 1;
    std::string cen_direction = "out";
    centrality->add_option("--paths", cen_paths, "Path file")->required();
    centrality->add_option("--model", cen_model, "Model class")
        ->check(CLI::IsMember({"network", "path", "mogen"}));
    centrality->add_option("--order", cen_order, "Maximum model order K (mogen only)");
    centrality->add_option("--measure", cen_measure, "Measure name")->required();
    centrality->add_option("--gt-order", cen_gt_order, "Evaluation order h for states");
    centrality->add_option("--direction", cen_direction, "Closeness distance direction")
        ->check(CLI::IsMember({"out", "in"}));

    auto* experiment = app.add_subcommand("experiment", "Run the out-of-sample ranking experiment");
    std::string exp_paths;
    std::string exp_config;
    std::string exp_measures;
    std::string exp_models;
    double exp_train_fraction = 0.0;
    int exp_gt_order = 0;
    std::uint32_t exp_repetitions = 0;
    double exp_top_fraction = 0.0;
    experiment->add_option("--paths", exp_paths, "Path file")->required();
    experiment->add_option("--config", exp_config, "Experiment config JSON");
    experiment->add_option("--measures", exp_measures, "Comma-separated measure names");
    experiment->add_option("--models", exp_models, "Comma-separated model labels (N, M2, P)");
    auto* opt_fraction =
        experiment->add_option("--train-fraction", exp_train_fraction, "Training fraction");
    auto* opt_gt = experiment->add_option("--gt-order", exp_gt_order, "Ground-truth order h");
    auto* opt_reps = experiment->add_option("--repetitions", exp_repetitions, "Repetitions");
    auto* opt_top = experiment->add_option("--top-fraction", exp_top_fraction, "Positive-label fraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (extract->parsed()) {
            std::optional<std::uint64_t> max_paths;
            if (max_paths_opt->count() > 0) max_paths = max_paths_value;
            return cmd_extract(global, temporal_file, delta, max_paths);
        }
        if (fit->parsed()) return cmd_fit(global, fit_paths, fit_order, model_out);
        if (centrality->parsed()) {
            return cmd_centrality(global, cen_paths, cen_model, cen_order, cen_measure,
                                  cen_gt_order, cen_direction);
        }
        if (experiment->parsed()) {
            const bool seed_given = app.count("--seed") > 0;
            return cmd_experiment(
                global, exp_paths, exp_config, exp_measures, exp_models,
                opt_fraction->count() ? std::optional<double>(exp_train_fraction) : std::nullopt,
                opt_gt->count() ? std::optional<int>(exp_gt_order) : std::nullopt,
                opt_reps->count() ? std::optional<std::uint32_t>(exp_repetitions) : std::nullopt,
                opt_top->count() ? std::optional<double>(exp_top_fraction) : std::nullopt,
                seed_given);
        }
        std::cerr << "error: no subcommand\n";
        return kExitInput;
    } catch (const ParseError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitInput;
    } catch (const ArgumentError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitInput;
    } catch (const SplitError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitInput;
    } catch (const UnsupportedMeasureError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitUnsupported;
    } catch (const ResourceError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitResource;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitFailure;
    }
}
