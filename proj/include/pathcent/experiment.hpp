#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pathcent/centrality.hpp"
#include "pathcent/path_data.hpp"

namespace pathcent {

/// One competing model in an experiment: the first-order network (N),
/// a multi-order model of a given maximum order (M1, M2, ...), or the
/// empirical path model (P).
struct ModelSpec {
    ModelKind kind = ModelKind::network;
    int max_order = 1;  // K for multi-order models; ignored otherwise

    bool operator==(const ModelSpec& other) const = default;
};

/// Short column label: "N", "M<K>", or "P".
std::string model_label(const ModelSpec& spec);
/// Inverse of model_label; throws ArgumentError on unknown labels.
ModelSpec parse_model_label(const std::string& label);

struct ExperimentConfig {
    std::vector<Measure> measures;
    std::vector<ModelSpec> models;
    double train_fraction = 0.3;
    int ground_truth_order = 1;  // h: order of the ranked sequences
    std::uint32_t repetitions = 5;
    double top_fraction = 0.10;
    std::uint64_t seed = 0;

    /// Throws ArgumentError on empty or duplicate measure/model lists,
    /// fractions outside (0,1), repetitions < 1, or order < 1.
    void validate() const;
};

/// One (measure, model, repetition) evaluation.
struct ExperimentCell {
    Measure measure{};
    std::string model;  // label, e.g. "M2"
    std::uint32_t repetition = 0;
    double auc = 0.0;
    bool valid = false;
    std::string note;  // failure reason when not valid
    std::size_t truth_states = 0;  // ranked sequences in the ground truth
    std::size_t positives = 0;     // top-fraction label count
    std::size_t unmatched = 0;     // truth states with no predicted suffix
};

struct SummaryRow {
    Measure measure{};
    std::string model;
    std::uint32_t valid_cells = 0;
    double mean_auc = 0.0;  // meaningful only when valid_cells > 0
    double std_auc = 0.0;   // sample standard deviation; 0 for one cell
};

struct RankingReport {
    ExperimentConfig config;
    std::vector<ExperimentCell> cells;  // repetition-major, then measure, then model
    std::vector<SummaryRow> summary;    // measure-major, then model, config order
    std::vector<std::uint32_t> invalid_repetitions;  // repetitions whose split failed
};

/// The ground truth of the out-of-sample experiment: the path-model
/// measure applied to the held-out test data at order h. Its score keys
/// are the ranked sequence set.
CentralityVector ground_truth(const PathDataset& test, Measure measure, int order);

/// A model prediction carried onto the ground-truth sequence set.
struct ProjectedPrediction {
    CentralityVector scores;             // exactly the truth states
    std::vector<std::string> unmatched;  // truth states that got the 0 default
};

/// Scores each truth state by the highest-order predicted state that is
/// a suffix of it; truth states without any predicted suffix (the node
/// itself unseen in training) score 0 and are listed as unmatched.
ProjectedPrediction project_prediction(const CentralityVector& prediction,
                                       const std::vector<std::string>& truth_states);

/// Binary relevance labels: 1 for the ceil(top_fraction * m) highest
/// ground-truth scores among m states, ties at the cutoff broken by
/// state name. Throws ArgumentError on an empty truth vector.
std::map<std::string, int> top_labels(const CentralityVector& truth, double top_fraction);

/// Mann-Whitney AUC: the probability that a uniformly random positive
/// outranks a uniformly random negative, ties counted one half. Scores
/// and labels must cover the same states. Throws EvaluationError when
/// labels are all one class.
double auc_score(const CentralityVector& scores, const std::map<std::string, int>& labels);

/// Runs the full pipeline: per repetition, split the data, fit every
/// configured model on the training half, compute every configured
/// measure, project onto the ground-truth sequences of the test half,
/// and evaluate the top-fraction AUC. Split or evaluation failures mark
/// the affected cells invalid without stopping other repetitions.
/// Deterministic for a given config; thread count never changes output.
RankingReport run_experiment(const PathDataset& ds, const ExperimentConfig& config,
                             unsigned threads = 1);

/// Test hook: like run_experiment but with caller-provided splits.
using SplitProvider =
    std::function<std::pair<PathDataset, PathDataset>(const PathDataset&, std::uint32_t)>;
RankingReport run_experiment_with_splits(const PathDataset& ds, const ExperimentConfig& config,
                                         const SplitProvider& splits, unsigned threads = 1);

/// Machine-readable report: config echo, per-cell values, summaries,
/// invalid repetitions. Byte-stable for identical reports.
std::string report_to_json(const RankingReport& report);

/// Mean-AUC matrix, measures as rows and model labels as columns;
/// cells with no valid repetition print "-".
std::string report_to_tsv(const RankingReport& report);

}  // namespace pathcent
