#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pathcent {

/// Separator between nodes in a path file line.
inline constexpr char kPathSeparator = ',';
/// Separator between member nodes of a composite (higher-order) state.
inline constexpr char kStateSeparator = '|';

/// An observed node sequence with a multiplicity. Nodes may repeat.
struct Path {
    std::vector<std::string> nodes;
    std::uint64_t frequency = 1;

    std::size_t length() const { return nodes.size(); }
};

/// An immutable multiset of paths in canonical form: sequences sorted
/// lexicographically, identical sequences merged by summing frequencies.
class PathDataset {
public:
    PathDataset() = default;

    /// Canonicalizes: merges identical sequences, drops zero frequencies,
    /// sorts. Throws Error on an empty node sequence.
    static PathDataset from_paths(std::vector<Path> paths);

    const std::vector<Path>& paths() const { return paths_; }
    /// Sorted set of node identifiers appearing on any path.
    const std::vector<std::string>& node_universe() const { return universe_; }
    /// Total number of path observations (sum of frequencies).
    std::uint64_t total_paths() const { return total_; }
    std::size_t unique_paths() const { return paths_.size(); }
    bool empty() const { return paths_.empty(); }
    /// Maximum sequence length in nodes; 0 for an empty dataset.
    std::size_t max_length() const { return max_length_; }

    /// Multiplicity-weighted mean number of nodes per path.
    double mean_length() const;
    /// Multiplicity-weighted median number of nodes per path.
    double median_length() const;

    bool operator==(const PathDataset& other) const { return paths_ == other.paths_; }

private:
    std::vector<Path> paths_;
    std::vector<std::string> universe_;
    std::uint64_t total_ = 0;
    std::size_t max_length_ = 0;
};

bool operator==(const Path& a, const Path& b);

/// Parses the path file format: one path per non-empty line,
/// `node(,node)*` optionally followed by a tab and a positive integer
/// frequency (default 1). Node identifiers must be non-empty and must not
/// contain ',' or '|'. Throws ParseError with the offending line number.
PathDataset parse_path_file(std::istream& in);
PathDataset parse_path_file(const std::string& text);

/// Writes the canonical path file: sorted sequences, `\t<freq>` appended
/// when the frequency is not 1. parse(write(ds)) == ds.
void write_path_file(const PathDataset& ds, std::ostream& out);
std::string to_path_file(const PathDataset& ds);

/// A time-stamped directed interaction.
struct TemporalEdge {
    std::string source;
    std::string target;
    std::int64_t timestamp = 0;
};

/// Time-stamped edge list; duplicates represent parallel interactions.
struct TemporalNetwork {
    std::vector<TemporalEdge> edges;
};

/// Parses CSV with header `source,target,timestamp` and integer
/// timestamps. Throws ParseError with line numbers.
TemporalNetwork parse_temporal_csv(std::istream& in);
TemporalNetwork parse_temporal_csv(const std::string& text);

/// Extracts all maximal time-respecting paths. Two edge occurrences
/// (v1,v2;t1), (v2,v3;t2) chain iff t1 < t2 and t2 - t1 <= delta; a
/// maximal path in the resulting causal DAG (extendable at neither end)
/// yields one node path. If more than max_paths paths would be produced
/// a ResourceError is thrown; nothing is ever truncated silently.
PathDataset extract_paths(const TemporalNetwork& net, std::int64_t delta,
                          std::optional<std::uint64_t> max_paths = std::nullopt);

/// Reproducible train/test split parameters.
struct SplitSpec {
    double train_fraction = 0.3;
    std::uint64_t seed = 0;
    std::uint32_t repetition_index = 0;
};

/// Assigns each of the N path observations (counting multiplicity)
/// independently to train with probability train_fraction, using a
/// generator derived from (seed, repetition_index). Throws SplitError if
/// either side ends up empty, ArgumentError on invalid inputs.
std::pair<PathDataset, PathDataset> split(const PathDataset& ds, const SplitSpec& spec);

/// Serialized composite state for a window of nodes (joined with '|').
std::string state_name(const std::vector<std::string>& nodes);
std::vector<std::string> state_tuple(const std::string& name);

/// Order-h state sequence of a node sequence: states of growing order
/// 1..min(l,h), then sliding windows of width h. The result has exactly
/// one state per node of the input.
std::vector<std::string> window_states(const std::vector<std::string>& nodes, int order);

/// Rewrites every path as its order-h state sequence; composite states
/// become the nodes of the returned dataset. order == 1 is the identity.
PathDataset window_sequences(const PathDataset& ds, int order);

}  // namespace pathcent
