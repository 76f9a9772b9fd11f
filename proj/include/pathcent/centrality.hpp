#pragma once

#include <map>
#include <string>
#include <vector>

#include "pathcent/mogen.hpp"
#include "pathcent/network_model.hpp"
#include "pathcent/path_data.hpp"

namespace pathcent {

/// The five measures. Network models support only the first two; the
/// remaining three need start/end information a plain topology lacks.
enum class Measure {
    betweenness,
    closeness,
    end_probability,
    continuation_probability,
    reach,
};

enum class ModelKind { network, mogen, path };

const std::vector<Measure>& all_measures();
std::string measure_name(Measure measure);
/// Inverse of measure_name; throws ArgumentError on unknown names.
Measure parse_measure(const std::string& name);
std::string model_kind_name(ModelKind kind);

/// A scored state set. `order` is the evaluation order h: scores are
/// keyed by order-h states — '|'-joined node windows, plain nodes at
/// h = 1 or below a path's length.
struct CentralityVector {
    Measure measure{};
    ModelKind model_kind{};
    int order = 1;
    std::map<std::string, double> scores;
};

// --- path model --------------------------------------------------------
// All five operate on the order-h windowed rewrite of the dataset, so the
// h = 1 definitions on windowed sequences are the general case. Scores
// cover exactly the states occurring in the windows.

/// Multiplicity-weighted count of interior occurrences (neither first nor
/// last position of a sequence), divided by N.
CentralityVector path_betweenness(const PathDataset& ds, int order = 1);
/// Harmonic closeness over shortest contiguous sub-path distances.
CentralityVector path_closeness(const PathDataset& ds, int order = 1,
                                Direction direction = Direction::out);
/// Fraction of paths whose final state is the given state.
CentralityVector path_end_probability(const PathDataset& ds, int order = 1);
/// Fraction of a state's occurrences that are not sequence-final.
CentralityVector path_continuation_probability(const PathDataset& ds, int order = 1);
/// Mean number of transitions remaining after an occurrence of the state.
CentralityVector path_reach(const PathDataset& ds, int order = 1);

// --- multi-order model -------------------------------------------------
// State-level scores follow the absorbing-chain algebra (visits = S F,
// ends = visits * R) and are then aggregated onto order-h suffix groups:
// sums for betweenness and end probability, visit-weighted averages for
// continuation and reach. Only states reachable from the start
// distribution participate; padding states never observed in training
// carry no probability mass and are not reported.

CentralityVector mogen_betweenness(const MogenModel& model, const FundamentalMatrix& f,
                                   int order = 1);
CentralityVector mogen_closeness(const MogenModel& model, int order = 1,
                                 Direction direction = Direction::out);
CentralityVector mogen_end_probability(const MogenModel& model, const FundamentalMatrix& f,
                                       int order = 1);
CentralityVector mogen_continuation_probability(const MogenModel& model,
                                                const FundamentalMatrix& f, int order = 1);
CentralityVector mogen_reach(const MogenModel& model, const FundamentalMatrix& f, int order = 1);

// --- network model -----------------------------------------------------

/// Harmonic closeness over BFS hop distances; always order 1.
CentralityVector network_closeness(const NetworkModel& model,
                                   Direction direction = Direction::out);

// --- dispatchers --------------------------------------------------------

/// Throws UnsupportedMeasureError for end/continuation/reach, which
/// cannot be computed for a network model.
CentralityVector compute_measure(const NetworkModel& model, Measure measure,
                                 Direction direction = Direction::out);
CentralityVector compute_measure(const MogenModel& model, const FundamentalMatrix& f,
                                 Measure measure, int order = 1,
                                 Direction direction = Direction::out);
CentralityVector compute_measure(const PathDataset& ds, Measure measure, int order = 1,
                                 Direction direction = Direction::out);

/// `state<TAB>score` lines, states sorted, 12 significant digits.
std::string to_tsv(const CentralityVector& vec);

}  // namespace pathcent
