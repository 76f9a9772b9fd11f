#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pathcent/path_data.hpp"

namespace pathcent {

/// Multi-order generative model over node sequences, read as an absorbing
/// Markov chain.  States are tuples of 1..K recently visited nodes in
/// canonical order (ascending order, then lexicographic); rows of
/// [Q | R] are stochastic.  Paths enter through the start distribution S
/// (order-1 states only) and leave through the absorbing column R.
///
/// The order-1 layer covers the whole training node universe.  Nodes that
/// never head a context row in the encoding keep a row that absorbs with
/// probability 1 so every row stays stochastic; they carry zero visit
/// weight and never influence a measure.
struct MogenModel {
    int max_order = 1;  // K
    std::uint64_t path_count = 0;  // N, the S normalizer

    std::vector<std::vector<std::string>> states;  // canonical order
    std::vector<std::string> state_names;          // '|'-joined tuples
    std::unordered_map<std::string, std::size_t> state_index;

    std::vector<double> start;   // S, nonzero only on order-1 states
    std::vector<double> absorb;  // R
    std::vector<std::vector<std::pair<std::size_t, double>>> transitions;  // Q rows, target-sorted

    // Raw counts underlying S, Q, R; empty for hand-built models.
    std::vector<std::uint64_t> start_counts;
    std::vector<std::uint64_t> end_counts;
    std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> transition_counts;

    std::size_t state_count() const { return states.size(); }
    std::optional<std::size_t> find_state(const std::string& name) const;
    int order_of(std::size_t state) const { return static_cast<int>(states[state].size()); }

    /// Checks row-stochasticity, the S distribution, and the block
    /// structure (order k -> k+1 below K, order K -> K shifted by one).
    /// Throws Error on any violation.
    void validate() const;

    /// Builds a model from explicit probabilities; used for hand-crafted
    /// generators. Validates before returning.
    static MogenModel from_probabilities(
        int max_order,
        const std::vector<std::vector<std::string>>& states,
        const std::map<std::string, double>& start,
        const std::map<std::string, std::map<std::string, double>>& transitions,
        const std::map<std::string, double>& absorb);
};

/// Fits the model: every path is encoded as its order-K state sequence
/// (growing prefixes, then sliding windows) ending in the absorbing
/// state; transitions are counted with multiplicity and rows normalized.
/// Unobserved transitions keep probability zero.
MogenModel fit_mogen(const PathDataset& train, int max_order);

/// F = (I - Q)^-1 behind a factorization: dense LU below 500 states,
/// sparse LU above.  Entry (i,j) is the expected number of visits to j
/// for a path currently in i, before it ends.
class FundamentalMatrix {
public:
    std::size_t size() const { return n_; }

    /// S * F: expected visits per path to each state.
    const std::vector<double>& visits_from_start() const { return visits_; }
    /// Row sums of F: expected node count of the remaining path.
    const std::vector<double>& row_sums() const { return row_sums_; }

    /// The full matrix; materialized on first use for large models.
    const std::vector<std::vector<double>>& dense() const;
    double entry(std::size_t i, std::size_t j) const { return dense()[i][j]; }

    /// max |(F (I - Q) - I)_ij|; materializes F.
    double residual_max() const;

private:
    friend FundamentalMatrix fundamental_matrix(const MogenModel& model);
    FundamentalMatrix() = default;

    std::size_t n_ = 0;
    std::vector<double> visits_;
    std::vector<double> row_sums_;
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Solves (I - Q) F = I via a linear factorization.  Throws
/// NumericalError, naming the offending states, if some transient state
/// cannot reach the absorbing state (which makes I - Q singular).
FundamentalMatrix fundamental_matrix(const MogenModel& model);

/// S * F as a per-state map: expected visits per path.
std::map<std::string, double> expected_visits(const MogenModel& model, const FundamentalMatrix& f);

/// Draws paths from the generative model: start from S, walk Q/R rows
/// until absorption; the last nodes of the visited states form the path.
PathDataset sample_paths(const MogenModel& model, std::uint64_t count, std::uint64_t seed);

/// JSON serialization; probabilities survive round-trips bit-exactly and
/// serialize(parse(serialize(m))) is byte-identical.
std::string to_json(const MogenModel& model);
MogenModel model_from_json(const std::string& json_text);
void save_model(const MogenModel& model, const std::string& file);
MogenModel load_model(const std::string& file);

}  // namespace pathcent
