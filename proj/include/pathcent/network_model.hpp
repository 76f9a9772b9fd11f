#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathcent/path_data.hpp"

namespace pathcent {

struct MogenModel;

/// First-order directed network observed on training paths: every
/// consecutive node pair becomes an edge with a multiplicity-weighted
/// observation count.
class NetworkModel {
public:
    static NetworkModel from_dataset(const PathDataset& train);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const std::string& node_name(std::size_t i) const { return nodes_[i]; }
    std::size_t node_index(const std::string& name) const;
    /// Out-neighbour indices, sorted, unique.
    const std::vector<std::size_t>& out_neighbors(std::size_t i) const { return adjacency_[i]; }
    /// Directed edges with observation counts, keyed (source, target).
    const std::map<std::pair<std::string, std::string>, std::uint64_t>& edges() const { return edges_; }
    bool empty() const { return nodes_.empty(); }

private:
    std::vector<std::string> nodes_;  // canonical sort
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::map<std::pair<std::string, std::string>, std::uint64_t> edges_;
};

/// Builds the first-order model of a training dataset.
NetworkModel build_network(const PathDataset& train);

/// Sentinel for "no path".
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// All-pairs shortest hop counts over a fixed state set. Row = source.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::string> states, std::vector<std::vector<std::uint32_t>> rows);

    const std::vector<std::string>& states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    std::uint32_t at(std::size_t source, std::size_t target) const { return rows_[source][target]; }
    const std::vector<std::uint32_t>& row(std::size_t source) const { return rows_[source]; }
    /// Distance by state name; kUnreachable when either state is unknown.
    std::uint32_t distance(const std::string& source, const std::string& target) const;

private:
    std::vector<std::string> states_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::uint32_t>> rows_;
};

/// BFS hop distances over the network topology.
DistanceMatrix all_pairs_distances(const NetworkModel& model);

/// Sub-path distances: d(v,w) is the length in transitions of the
/// shortest contiguous sub-path starting in v and ending in w across all
/// observed paths; unreachable when no such sub-path exists.
DistanceMatrix all_pairs_distances(const PathDataset& ds);

/// BFS hop distances over the transient multi-order topology (edges where
/// Q > 0); states are all multi-order states of the model.
DistanceMatrix all_pairs_distances(const MogenModel& model);

/// Projects a multi-order distance matrix down to order-h suffix states:
/// every state maps to its last min(h, order) nodes, and each projected
/// entry is the minimum D(u,w) over the preimages. h = 1 (the default)
/// projects to first-order nodes: d(a,b) = min D(u,w) over states u
/// ending in a and w ending in b.
DistanceMatrix project_distances(const DistanceMatrix& multi_order, int order = 1);

enum class Direction { out, in };

/// Harmonic closeness c_v = sum of 1/d over reachable targets w != v.
/// Direction::out uses d(v, .) rows (the default); Direction::in uses
/// d(., v) columns.
std::map<std::string, double> harmonic_closeness(const DistanceMatrix& d,
                                                 Direction direction = Direction::out);

/// Betweenness over all ordered pairs (s,t), s != t != v, accumulating
/// sigma_st(v) / sigma_st with all shortest paths counted.
std::map<std::string, double> network_betweenness(const NetworkModel& model);

}  // namespace pathcent
