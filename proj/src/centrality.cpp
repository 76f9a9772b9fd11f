#include "pathcent/centrality.hpp"

#include <algorithm>
#include <deque>

#include "pathcent/errors.hpp"
#include "pathcent/text.hpp"

namespace pathcent {

const std::vector<Measure>& all_measures() {
    static const std::vector<Measure> measures = {
        Measure::betweenness,
        Measure::closeness,
        Measure::end_probability,
        Measure::continuation_probability,
        Measure::reach,
    };
    return measures;
}

std::string measure_name(Measure measure) {
    switch (measure) {
        case Measure::betweenness: return "betweenness";
        case Measure::closeness: return "closeness";
        case Measure::end_probability: return "end_probability";
        case Measure::continuation_probability: return "continuation_probability";
        case Measure::reach: return "reach";
    }
    throw ArgumentError("invalid measure value");
}

Measure parse_measure(const std::string& name) {
    for (const Measure m : all_measures()) {
        if (measure_name(m) == name) return m;
    }
    throw ArgumentError("unknown measure '" + name + "'");
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::network: return "network";
        case ModelKind::mogen: return "mogen";
        case ModelKind::path: return "path";
    }
    throw ArgumentError("invalid model kind value");
}

// --- path model --------------------------------------------------------

namespace {

/// Per-state tallies over the order-h windowed sequences. All counts are
/// exact integers; scores divide only at the end so identical inputs give
/// bitwise-identical results.
struct WindowCounts {
    std::map<std::string, std::uint64_t> visits;
    std::map<std::string, std::uint64_t> interior;
    std::map<std::string, std::uint64_t> ends;
    std::map<std::string, std::uint64_t> remaining;  // transitions after each occurrence
};

WindowCounts window_counts(const PathDataset& ds, int order) {
    if (order < 1) throw ArgumentError("window order must be at least 1");
    if (ds.empty()) throw ArgumentError("empty dataset");
    WindowCounts counts;
    for (const auto& path : ds.paths()) {
        const auto sequence = window_states(path.nodes, order);
        const std::size_t l = sequence.size();
        for (std::size_t i = 0; i < l; ++i) {
            const std::string& state = sequence[i];
            counts.visits[state] += path.frequency;
            if (i > 0 && i + 1 < l) counts.interior[state] += path.frequency;
            if (i + 1 == l) counts.ends[state] += path.frequency;
            counts.remaining[state] += path.frequency * static_cast<std::uint64_t>(l - 1 - i);
        }
    }
    return counts;
}

}  // namespace

CentralityVector path_betweenness(const PathDataset& ds, int order) {
    const auto counts = window_counts(ds, order);
    CentralityVector vec{Measure::betweenness, ModelKind::path, order, {}};
    const double n = static_cast<double>(ds.total_paths());
    for (const auto& [state, visits] : counts.visits) {
        const auto it = counts.interior.find(state);
        const std::uint64_t inner = it == counts.interior.end() ? 0 : it->second;
        vec.scores[state] = static_cast<double>(inner) / n;
    }
    return vec;
}

CentralityVector path_end_probability(const PathDataset& ds, int order) {
    const auto counts = window_counts(ds, order);
    CentralityVector vec{Measure::end_probability, ModelKind::path, order, {}};
    const double n = static_cast<double>(ds.total_paths());
    for (const auto& [state, visits] : counts.visits) {
        const auto it = counts.ends.find(state);
        const std::uint64_t ends = it == counts.ends.end() ? 0 : it->second;
        vec.scores[state] = static_cast<double>(ends) / n;
    }
    return vec;
}

CentralityVector path_continuation_probability(const PathDataset& ds, int order) {
    const auto counts = window_counts(ds, order);
    CentralityVector vec{Measure::continuation_probability, ModelKind::path, order, {}};
    for (const auto& [state, visits] : counts.visits) {
        const auto it = counts.ends.find(state);
        const std::uint64_t ends = it == counts.ends.end() ? 0 : it->second;
        vec.scores[state] =
            static_cast<double>(visits - ends) / static_cast<double>(visits);
    }
    return vec;
}

CentralityVector path_reach(const PathDataset& ds, int order) {
    const auto counts = window_counts(ds, order);
    CentralityVector vec{Measure::reach, ModelKind::path, order, {}};
    for (const auto& [state, visits] : counts.visits) {
        const auto it = counts.remaining.find(state);
        const std::uint64_t remaining = it == counts.remaining.end() ? 0 : it->second;
        vec.scores[state] =
            static_cast<double>(remaining) / static_cast<double>(visits);
    }
    return vec;
}

CentralityVector path_closeness(const PathDataset& ds, int order, Direction direction) {
    if (order < 1) throw ArgumentError("window order must be at least 1");
    if (ds.empty()) throw ArgumentError("empty dataset");
    const PathDataset windowed = window_sequences(ds, order);
    const DistanceMatrix distances = all_pairs_distances(windowed);
    CentralityVector vec{Measure::closeness, ModelKind::path, order, {}};
    vec.scores = harmonic_closeness(distances, direction);
    return vec;
}

// --- multi-order model -------------------------------------------------

namespace {

/// States reachable from the start distribution along positive
/// transitions — the states a generated path can actually visit. The
/// complement is the padding rows that keep unvisited nodes
/// row-stochastic; they carry zero mass and are excluded from scores.
std::vector<char> live_states(const MogenModel& model) {
    std::vector<char> live(model.states.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (model.start[i] > 0.0) {
            live[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& [target, prob] : model.transitions[v]) {
            if (prob > 0.0 && !live[target]) {
                live[target] = 1;
                queue.push_back(target);
            }
        }
    }
    return live;
}

std::string suffix_key(const std::vector<std::string>& tuple, int order) {
    const std::size_t keep =
        std::min<std::size_t>(tuple.size(), static_cast<std::size_t>(order));
    return state_name({tuple.end() - static_cast<std::ptrdiff_t>(keep), tuple.end()});
}

void require_order(int order) {
    if (order < 1) throw ArgumentError("aggregation order must be at least 1");
}

/// Sum per-state values over order-h suffix groups of live states.
std::map<std::string, double> aggregate_sum(const MogenModel& model,
                                            const std::vector<double>& value, int order) {
    const auto live = live_states(model);
    std::map<std::string, double> scores;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (!live[i]) continue;
        scores[suffix_key(model.states[i], order)] += value[i];
    }
    return scores;
}

/// Visit-weighted average of per-state values over order-h suffix groups.
std::map<std::string, double> aggregate_average(const MogenModel& model,
                                                const std::vector<double>& weight,
                                                const std::vector<double>& value, int order) {
    const auto live = live_states(model);
    std::map<std::string, double> numerator;
    std::map<std::string, double> denominator;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (!live[i]) continue;
        const std::string key = suffix_key(model.states[i], order);
        numerator[key] += weight[i] * value[i];
        denominator[key] += weight[i];
    }
    std::map<std::string, double> scores;
    for (const auto& [key, den] : denominator) {
        if (den > 0.0) scores[key] = numerator[key] / den;
    }
    return scores;
}

void check_fundamental(const MogenModel& model, const FundamentalMatrix& f) {
    if (f.size() != model.states.size()) {
        throw ArgumentError("fundamental matrix does not match the model");
    }
}

}  // namespace

CentralityVector mogen_betweenness(const MogenModel& model, const FundamentalMatrix& f,
                                   int order) {
    require_order(order);
    check_fundamental(model, f);
    const auto& visits = f.visits_from_start();
    std::vector<double> value(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        // Expected interior visits: total visits minus the start and end
        // probabilities. A state that is both start and end of the same
        // one-node path is subtracted twice; the floor at zero keeps the
        // score an occurrence count (betweenness is never negative).
        value[i] = std::max(0.0, visits[i] - model.start[i] - visits[i] * model.absorb[i]);
    }
    return {Measure::betweenness, ModelKind::mogen, order, aggregate_sum(model, value, order)};
}

CentralityVector mogen_end_probability(const MogenModel& model, const FundamentalMatrix& f,
                                       int order) {
    require_order(order);
    check_fundamental(model, f);
    const auto& visits = f.visits_from_start();
    std::vector<double> value(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        value[i] = visits[i] * model.absorb[i];
    }
    return {Measure::end_probability, ModelKind::mogen, order,
            aggregate_sum(model, value, order)};
}

CentralityVector mogen_continuation_probability(const MogenModel& model,
                                                const FundamentalMatrix& f, int order) {
    require_order(order);
    check_fundamental(model, f);
    const auto& visits = f.visits_from_start();
    std::vector<double> value(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        value[i] = 1.0 - model.absorb[i];
    }
    return {Measure::continuation_probability, ModelKind::mogen, order,
            aggregate_average(model, visits, value, order)};
}

CentralityVector mogen_reach(const MogenModel& model, const FundamentalMatrix& f, int order) {
    require_order(order);
    check_fundamental(model, f);
    const auto& visits = f.visits_from_start();
    const auto& row_sums = f.row_sums();
    std::vector<double> value(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        value[i] = row_sums[i] - 1.0;
    }
    return {Measure::reach, ModelKind::mogen, order,
            aggregate_average(model, visits, value, order)};
}

CentralityVector mogen_closeness(const MogenModel& model, int order, Direction direction) {
    require_order(order);
    const DistanceMatrix full = all_pairs_distances(model);
    const auto live = live_states(model);

    // Restrict to live states before projecting. Padding states have no
    // transitions in either direction, so dropping them only removes
    // their isolated self-distance entries.
    std::vector<std::string> states;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (!live[i]) continue;
        states.push_back(model.state_names[i]);
        keep.push_back(i);
    }
    std::vector<std::vector<std::uint32_t>> rows(keep.size(),
                                                 std::vector<std::uint32_t>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = 0; b < keep.size(); ++b) rows[a][b] = full.at(keep[a], keep[b]);
    }
    const DistanceMatrix projected =
        project_distances(DistanceMatrix(std::move(states), std::move(rows)), order);

    CentralityVector vec{Measure::closeness, ModelKind::mogen, order, {}};
    vec.scores = harmonic_closeness(projected, direction);
    return vec;
}

// --- network model -----------------------------------------------------

CentralityVector network_closeness(const NetworkModel& model, Direction direction) {
    CentralityVector vec{Measure::closeness, ModelKind::network, 1, {}};
    vec.scores = harmonic_closeness(all_pairs_distances(model), direction);
    return vec;
}

// --- dispatchers --------------------------------------------------------

CentralityVector compute_measure(const NetworkModel& model, Measure measure,
                                 Direction direction) {
    switch (measure) {
        case Measure::betweenness:
            return {Measure::betweenness, ModelKind::network, 1, network_betweenness(model)};
        case Measure::closeness:
            return network_closeness(model, direction);
        default:
            throw UnsupportedMeasureError(measure_name(measure) +
                                          " cannot be computed for a network model");
    }
}

CentralityVector compute_measure(const MogenModel& model, const FundamentalMatrix& f,
                                 Measure measure, int order, Direction direction) {
    switch (measure) {
        case Measure::betweenness: return mogen_betweenness(model, f, order);
        case Measure::closeness: return mogen_closeness(model, order, direction);
        case Measure::end_probability: return mogen_end_probability(model, f, order);
        case Measure::continuation_probability:
            return mogen_continuation_probability(model, f, order);
        case Measure::reach: return mogen_reach(model, f, order);
    }
    throw ArgumentError("invalid measure value");
}

CentralityVector compute_measure(const PathDataset& ds, Measure measure, int order,
                                 Direction direction) {
    switch (measure) {
        case Measure::betweenness: return path_betweenness(ds, order);
        case Measure::closeness: return path_closeness(ds, order, direction);
        case Measure::end_probability: return path_end_probability(ds, order);
        case Measure::continuation_probability: return path_continuation_probability(ds, order);
        case Measure::reach: return path_reach(ds, order);
    }
    throw ArgumentError("invalid measure value");
}

std::string to_tsv(const CentralityVector& vec) {
    std::string out;
    for (const auto& [state, score] : vec.scores) {
        out += state;
        out += '\t';
        out += text::format_double(score);
        out += '\n';
    }
    return out;
}

}  // namespace pathcent
