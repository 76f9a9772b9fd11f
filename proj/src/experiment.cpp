#include "pathcent/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "pathcent/errors.hpp"
#include "pathcent/text.hpp"

namespace pathcent {

std::string model_label(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::network: return "N";
        case ModelKind::path: return "P";
        case ModelKind::mogen: return "M" + std::to_string(spec.max_order);
    }
    throw ArgumentError("invalid model kind value");
}

ModelSpec parse_model_label(const std::string& label) {
    if (label == "N") return {ModelKind::network, 1};
    if (label == "P") return {ModelKind::path, 1};
    if (label.size() >= 2 && label[0] == 'M') {
        int order = 0;
        for (std::size_t i = 1; i < label.size(); ++i) {
            if (label[i] < '0' || label[i] > '9') order = -1;
            if (order < 0) break;
            order = order * 10 + (label[i] - '0');
            if (order > 1000000) order = -1;
        }
        if (order >= 1) return {ModelKind::mogen, order};
    }
    throw ArgumentError("unknown model label '" + label + "' (expected N, P, or M<order>)");
}

void ExperimentConfig::validate() const {
    if (measures.empty()) throw ArgumentError("experiment needs at least one measure");
    if (models.empty()) throw ArgumentError("experiment needs at least one model");
    std::set<std::string> seen_measures;
    for (const Measure m : measures) {
        if (!seen_measures.insert(measure_name(m)).second) {
            throw ArgumentError("duplicate measure " + measure_name(m));
        }
    }
    std::set<std::string> seen_models;
    for (const ModelSpec& spec : models) {
        if (spec.kind == ModelKind::mogen && spec.max_order < 1) {
            throw ArgumentError("model order must be at least 1");
        }
        if (!seen_models.insert(model_label(spec)).second) {
            throw ArgumentError("duplicate model " + model_label(spec));
        }
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ArgumentError("train fraction must lie strictly between 0 and 1");
    }
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
        throw ArgumentError("top fraction must lie strictly between 0 and 1");
    }
    if (ground_truth_order < 1) throw ArgumentError("ground-truth order must be at least 1");
    if (repetitions < 1) throw ArgumentError("repetitions must be at least 1");
}

CentralityVector ground_truth(const PathDataset& test, Measure measure, int order) {
    return compute_measure(test, measure, order);
}

ProjectedPrediction project_prediction(const CentralityVector& prediction,
                                       const std::vector<std::string>& truth_states) {
    ProjectedPrediction result;
    result.scores.measure = prediction.measure;
    result.scores.model_kind = prediction.model_kind;
    result.scores.order = prediction.order;
    for (const std::string& state : truth_states) {
        const auto tuple = state_tuple(state);
        double score = 0.0;
        bool matched = false;
        // Longest predicted suffix wins; fall back one node at a time.
        for (std::size_t keep = tuple.size(); keep >= 1; --keep) {
            const std::string candidate =
                state_name({tuple.end() - static_cast<std::ptrdiff_t>(keep), tuple.end()});
            const auto it = prediction.scores.find(candidate);
            if (it != prediction.scores.end()) {
                score = it->second;
                matched = true;
                break;
            }
        }
        result.scores.scores[state] = score;
        if (!matched) result.unmatched.push_back(state);
    }
    return result;
}

std::map<std::string, int> top_labels(const CentralityVector& truth, double top_fraction) {
    if (truth.scores.empty()) throw ArgumentError("cannot label an empty ground truth");
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
        throw ArgumentError("top fraction must lie strictly between 0 and 1");
    }
    const std::size_t m = truth.scores.size();
    // ceil with a guard against upward rounding noise in the product
    // (0.1 * 30 is slightly above 3 in binary).
    std::size_t positives = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(m) - 1e-9));
    positives = std::max<std::size_t>(1, std::min(positives, m));

    std::vector<std::pair<std::string, double>> ranked(truth.scores.begin(), truth.scores.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // cutoff ties resolved by state name
    });

    std::map<std::string, int> labels;
    for (std::size_t i = 0; i < ranked.size(); ++i) labels[ranked[i].first] = i < positives;
    return labels;
}

double auc_score(const CentralityVector& scores, const std::map<std::string, int>& labels) {
    if (scores.scores.size() != labels.size()) {
        throw ArgumentError("scores and labels cover different state sets");
    }
    std::vector<std::pair<double, int>> items;
    items.reserve(labels.size());
    for (const auto& [state, label] : labels) {
        const auto it = scores.scores.find(state);
        if (it == scores.scores.end()) {
            throw ArgumentError("missing score for state " + state);
        }
        items.emplace_back(it->second, label);
    }
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t n = items.size();
    std::size_t positives = 0;
    for (const auto& [score, label] : items) positives += label != 0;
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw EvaluationError("labels are all one class; AUC is undefined");
    }

    // Mann-Whitney with average ranks across tied scores.
    double rank_sum = 0.0;  // sum of positive ranks, 1-based
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && items[j].first == items[i].first) ++j;
        const double average_rank = 0.5 * static_cast<double>(i + 1 + j);  // (i+1 + j) / 2
        for (std::size_t k = i; k < j; ++k) {
            if (items[k].second != 0) rank_sum += average_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double q = static_cast<double>(negatives);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

namespace {

/// Everything fitted once per repetition and shared across measures.
struct RepetitionModels {
    PathDataset train;
    PathDataset test;
    bool have_network = false;
    NetworkModel network;
    std::vector<std::pair<int, MogenModel>> mogen;  // by max order
    std::vector<std::pair<int, FundamentalMatrix>> fundamentals;
};

CentralityVector predict(const RepetitionModels& fitted, const ModelSpec& spec, Measure measure,
                         int order) {
    switch (spec.kind) {
        case ModelKind::network:
            return compute_measure(fitted.network, measure);
        case ModelKind::path:
            return compute_measure(fitted.train, measure, order);
        case ModelKind::mogen: {
            const MogenModel* model = nullptr;
            const FundamentalMatrix* f = nullptr;
            for (const auto& [k, m] : fitted.mogen) {
                if (k == spec.max_order) model = &m;
            }
            for (const auto& [k, fm] : fitted.fundamentals) {
                if (k == spec.max_order) f = &fm;
            }
            if (model == nullptr || f == nullptr) {
                throw ArgumentError("model M" + std::to_string(spec.max_order) + " not fitted");
            }
            return compute_measure(*model, *f, measure, order);
        }
    }
    throw ArgumentError("invalid model kind value");
}

void run_repetition(const PathDataset& ds, const ExperimentConfig& config,
                    const SplitProvider& splits, std::uint32_t repetition,
                    std::vector<ExperimentCell>& cells, bool& split_failed,
                    std::string& split_note) {
    cells.clear();
    split_failed = false;

    RepetitionModels fitted;
    try {
        auto [train, test] = splits(ds, repetition);
        fitted.train = std::move(train);
        fitted.test = std::move(test);
    } catch (const Error& error) {
        split_failed = true;
        split_note = error.what();
    }

    for (const Measure measure : config.measures) {
        // Ground truth and labels are shared by all models of this cell row.
        CentralityVector truth;
        std::map<std::string, int> labels;
        std::vector<std::string> truth_states;
        std::string truth_note;
        if (!split_failed) {
            try {
                truth = ground_truth(fitted.test, measure, config.ground_truth_order);
                labels = top_labels(truth, config.top_fraction);
                for (const auto& [state, score] : truth.scores) truth_states.push_back(state);
            } catch (const Error& error) {
                truth_note = error.what();
            }
        }

        for (const ModelSpec& spec : config.models) {
            ExperimentCell cell;
            cell.measure = measure;
            cell.model = model_label(spec);
            cell.repetition = repetition;
            if (split_failed) {
                cell.note = "split failed: " + split_note;
                cells.push_back(std::move(cell));
                continue;
            }
            if (!truth_note.empty()) {
                cell.note = "ground truth failed: " + truth_note;
                cells.push_back(std::move(cell));
                continue;
            }
            cell.truth_states = truth_states.size();
            try {
                // Lazily fit each model the first time a measure needs it.
                if (spec.kind == ModelKind::network && !fitted.have_network) {
                    fitted.network = build_network(fitted.train);
                    fitted.have_network = true;
                } else if (spec.kind == ModelKind::mogen) {
                    bool have = false;
                    for (const auto& [k, m] : fitted.mogen) have = have || k == spec.max_order;
                    if (!have) {
                        MogenModel model = fit_mogen(fitted.train, spec.max_order);
                        FundamentalMatrix f = fundamental_matrix(model);
                        fitted.mogen.emplace_back(spec.max_order, std::move(model));
                        fitted.fundamentals.emplace_back(spec.max_order, std::move(f));
                    }
                }
                const CentralityVector prediction =
                    predict(fitted, spec, measure, config.ground_truth_order);
                const ProjectedPrediction projected =
                    project_prediction(prediction, truth_states);
                cell.unmatched = projected.unmatched.size();
                std::size_t positives = 0;
                for (const auto& [state, label] : labels) positives += label != 0;
                cell.positives = positives;
                cell.auc = auc_score(projected.scores, labels);
                cell.valid = true;
            } catch (const Error& error) {
                cell.note = error.what();
            }
            cells.push_back(std::move(cell));
        }
    }
}

void summarize(RankingReport& report) {
    report.summary.clear();
    for (const Measure measure : report.config.measures) {
        for (const ModelSpec& spec : report.config.models) {
            SummaryRow row;
            row.measure = measure;
            row.model = model_label(spec);
            double sum = 0.0;
            for (const ExperimentCell& cell : report.cells) {
                if (cell.measure != measure || cell.model != row.model || !cell.valid) continue;
                sum += cell.auc;
                ++row.valid_cells;
            }
            if (row.valid_cells > 0) {
                row.mean_auc = sum / static_cast<double>(row.valid_cells);
                double squares = 0.0;
                for (const ExperimentCell& cell : report.cells) {
                    if (cell.measure != measure || cell.model != row.model || !cell.valid)
                        continue;
                    const double d = cell.auc - row.mean_auc;
                    squares += d * d;
                }
                row.std_auc = row.valid_cells > 1
                                  ? std::sqrt(squares / static_cast<double>(row.valid_cells - 1))
                                  : 0.0;
            }
            report.summary.push_back(std::move(row));
        }
    }
}

}  // namespace

RankingReport run_experiment_with_splits(const PathDataset& ds, const ExperimentConfig& config,
                                         const SplitProvider& splits, unsigned threads) {
    config.validate();
    if (ds.empty()) throw ArgumentError("empty dataset");

    const std::uint32_t repetitions = config.repetitions;
    std::vector<std::vector<ExperimentCell>> slots(repetitions);
    std::vector<char> failed(repetitions, 0);
    std::vector<std::string> notes(repetitions);

    auto work = [&](std::uint32_t first, std::uint32_t stride) {
        for (std::uint32_t rep = first; rep < repetitions; rep += stride) {
            bool split_failed = false;
            run_repetition(ds, config, splits, rep, slots[rep], split_failed, notes[rep]);
            failed[rep] = split_failed;
        }
    };

    const unsigned workers =
        std::max(1u, std::min(threads, static_cast<unsigned>(repetitions)));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }

    RankingReport report;
    report.config = config;
    for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
        for (ExperimentCell& cell : slots[rep]) report.cells.push_back(std::move(cell));
        if (failed[rep]) report.invalid_repetitions.push_back(rep);
    }
    summarize(report);
    return report;
}

RankingReport run_experiment(const PathDataset& ds, const ExperimentConfig& config,
                             unsigned threads) {
    const SplitProvider provider = [&config](const PathDataset& data, std::uint32_t repetition) {
        SplitSpec spec;
        spec.train_fraction = config.train_fraction;
        spec.seed = config.seed;
        spec.repetition_index = repetition;
        return split(data, spec);
    };
    return run_experiment_with_splits(ds, config, provider, threads);
}

// --- report output ------------------------------------------------------

std::string report_to_json(const RankingReport& report) {
    using json = nlohmann::ordered_json;
    json root;

    json measures = json::array();
    for (const Measure m : report.config.measures) measures.push_back(measure_name(m));
    json models = json::array();
    for (const ModelSpec& spec : report.config.models) models.push_back(model_label(spec));
    root["config"] = {
        {"measures", measures},
        {"models", models},
        {"train_fraction", report.config.train_fraction},
        {"ground_truth_order", report.config.ground_truth_order},
        {"repetitions", report.config.repetitions},
        {"top_fraction", report.config.top_fraction},
        {"seed", report.config.seed},
    };

    json cells = json::array();
    for (const ExperimentCell& cell : report.cells) {
        json entry = {
            {"measure", measure_name(cell.measure)},
            {"model", cell.model},
            {"repetition", cell.repetition},
            {"valid", cell.valid},
        };
        if (cell.valid) {
            entry["auc"] = cell.auc;
            entry["truth_states"] = cell.truth_states;
            entry["positives"] = cell.positives;
            entry["unmatched"] = cell.unmatched;
        } else {
            entry["note"] = cell.note;
        }
        cells.push_back(std::move(entry));
    }
    root["cells"] = std::move(cells);

    json summary = json::array();
    for (const SummaryRow& row : report.summary) {
        json entry = {
            {"measure", measure_name(row.measure)},
            {"model", row.model},
            {"valid_repetitions", row.valid_cells},
        };
        if (row.valid_cells > 0) {
            entry["mean_auc"] = row.mean_auc;
            entry["std_auc"] = row.std_auc;
        }
        summary.push_back(std::move(entry));
    }
    root["summary"] = std::move(summary);
    root["invalid_repetitions"] = report.invalid_repetitions;

    return root.dump(2) + "\n";
}

std::string report_to_tsv(const RankingReport& report) {
    std::string out = "measure";
    for (const ModelSpec& spec : report.config.models) {
        out += '\t';
        out += model_label(spec);
    }
    out += '\n';
    for (const Measure measure : report.config.measures) {
        out += measure_name(measure);
        for (const ModelSpec& spec : report.config.models) {
            const std::string label = model_label(spec);
            out += '\t';
            bool found = false;
            for (const SummaryRow& row : report.summary) {
                if (row.measure == measure && row.model == label) {
                    out += row.valid_cells > 0 ? text::format_double(row.mean_auc) : "-";
                    found = true;
                    break;
                }
            }
            if (!found) out += '-';
        }
        out += '\n';
    }
    return out;
}

}  // namespace pathcent
