#include "pathcent/network_model.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "pathcent/errors.hpp"
#include "pathcent/mogen.hpp"

namespace pathcent {

NetworkModel NetworkModel::from_dataset(const PathDataset& train) {
    if (train.empty()) throw ArgumentError("cannot build a network model from an empty dataset");
    NetworkModel m;
    m.nodes_ = train.node_universe();
    for (std::size_t i = 0; i < m.nodes_.size(); ++i) m.index_[m.nodes_[i]] = i;
    m.adjacency_.resize(m.nodes_.size());
    for (const auto& p : train.paths())
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            m.edges_[{p.nodes[i], p.nodes[i + 1]}] += p.frequency;
    for (const auto& [edge, count] : m.edges_)
        m.adjacency_[m.index_.at(edge.first)].push_back(m.index_.at(edge.second));
    for (auto& row : m.adjacency_) std::sort(row.begin(), row.end());
    return m;
}

std::size_t NetworkModel::node_index(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ArgumentError("unknown node '" + name + "'");
    return it->second;
}

NetworkModel build_network(const PathDataset& train) {
    return NetworkModel::from_dataset(train);
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> states,
                               std::vector<std::vector<std::uint32_t>> rows)
    : states_(std::move(states)), rows_(std::move(rows)) {
    for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = i;
}

std::uint32_t DistanceMatrix::distance(const std::string& source, const std::string& target) const {
    const auto s = index_.find(source);
    const auto t = index_.find(target);
    if (s == index_.end() || t == index_.end()) return kUnreachable;
    return rows_[s->second][t->second];
}

namespace {

std::vector<std::uint32_t> bfs_row(const std::vector<std::vector<std::size_t>>& adjacency,
                                   std::size_t source) {
    std::vector<std::uint32_t> dist(adjacency.size(), kUnreachable);
    std::deque<std::size_t> queue;
    dist[source] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (const std::size_t w : adjacency[u]) {
            if (dist[w] != kUnreachable) continue;
            dist[w] = dist[u] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

DistanceMatrix bfs_all_pairs(std::vector<std::string> states,
                             const std::vector<std::vector<std::size_t>>& adjacency) {
    std::vector<std::vector<std::uint32_t>> rows(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) rows[s] = bfs_row(adjacency, s);
    return DistanceMatrix(std::move(states), std::move(rows));
}

}  // namespace

DistanceMatrix all_pairs_distances(const NetworkModel& model) {
    if (model.empty()) throw ArgumentError("empty network model");
    std::vector<std::vector<std::size_t>> adjacency(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) adjacency[i] = model.out_neighbors(i);
    return bfs_all_pairs(model.nodes(), adjacency);
}

DistanceMatrix all_pairs_distances(const PathDataset& ds) {
    if (ds.empty()) throw ArgumentError("empty dataset");
    const auto& states = ds.node_universe();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;

    std::vector<std::vector<std::uint32_t>> rows(
        states.size(), std::vector<std::uint32_t>(states.size(), kUnreachable));
    for (std::size_t i = 0; i < states.size(); ++i) rows[i][i] = 0;

    // Multiplicity is irrelevant for a minimum; scan unique paths once.
    for (const auto& p : ds.paths()) {
        std::vector<std::size_t> idx(p.nodes.size());
        for (std::size_t i = 0; i < p.nodes.size(); ++i) idx[i] = index.at(p.nodes[i]);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                const auto d = static_cast<std::uint32_t>(j - i);
                rows[idx[i]][idx[j]] = std::min(rows[idx[i]][idx[j]], d);
            }
    }
    return DistanceMatrix(states, std::move(rows));
}

DistanceMatrix all_pairs_distances(const MogenModel& model) {
    if (model.states.empty()) throw ArgumentError("empty multi-order model");
    std::vector<std::vector<std::size_t>> adjacency(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        adjacency[i].reserve(model.transitions[i].size());
        for (const auto& [target, prob] : model.transitions[i])
            if (prob > 0.0) adjacency[i].push_back(target);
    }
    return bfs_all_pairs(model.state_names, adjacency);
}

DistanceMatrix project_distances(const DistanceMatrix& multi_order, int order) {
    if (order < 1) throw ArgumentError("projection order must be at least 1");
    std::set<std::string> node_set;
    std::vector<std::string> last(multi_order.size());
    for (std::size_t i = 0; i < multi_order.size(); ++i) {
        auto tuple = state_tuple(multi_order.states()[i]);
        const std::size_t keep = std::min<std::size_t>(tuple.size(), static_cast<std::size_t>(order));
        last[i] = state_name({tuple.end() - static_cast<std::ptrdiff_t>(keep), tuple.end()});
        node_set.insert(last[i]);
    }
    std::vector<std::string> nodes(node_set.begin(), node_set.end());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;

    std::vector<std::vector<std::uint32_t>> rows(nodes.size(),
                                                 std::vector<std::uint32_t>(nodes.size(), kUnreachable));
    for (std::size_t u = 0; u < multi_order.size(); ++u) {
        const std::size_t a = index.at(last[u]);
        const auto& row = multi_order.row(u);
        for (std::size_t w = 0; w < row.size(); ++w) {
            if (row[w] == kUnreachable) continue;
            const std::size_t b = index.at(last[w]);
            rows[a][b] = std::min(rows[a][b], row[w]);
        }
    }
    return DistanceMatrix(std::move(nodes), std::move(rows));
}

std::map<std::string, double> harmonic_closeness(const DistanceMatrix& d, Direction direction) {
    std::map<std::string, double> scores;
    const std::size_t n = d.size();
    for (std::size_t v = 0; v < n; ++v) {
        double sum = 0.0;
        for (std::size_t w = 0; w < n; ++w) {
            if (w == v) continue;
            const std::uint32_t dist = direction == Direction::out ? d.at(v, w) : d.at(w, v);
            if (dist == kUnreachable || dist == 0) continue;
            sum += 1.0 / static_cast<double>(dist);
        }
        scores[d.states()[v]] = sum;
    }
    return scores;
}

std::map<std::string, double> network_betweenness(const NetworkModel& model) {
    const std::size_t n = model.size();
    std::vector<std::vector<std::size_t>> forward(n);
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t i = 0; i < n; ++i) {
        forward[i] = model.out_neighbors(i);
        for (const std::size_t w : forward[i]) reverse[w].push_back(i);
    }
    for (auto& row : reverse) std::sort(row.begin(), row.end());

    // Shortest-path counts by BFS; counts stay exact in doubles well past
    // any graph size this handles.
    auto count_from = [](const std::vector<std::vector<std::size_t>>& adjacency, std::size_t source,
                         std::vector<std::uint32_t>& dist, std::vector<double>& sigma) {
        dist.assign(adjacency.size(), kUnreachable);
        sigma.assign(adjacency.size(), 0.0);
        dist[source] = 0;
        sigma[source] = 1.0;
        std::deque<std::size_t> queue{source};
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (const std::size_t w : adjacency[u]) {
                if (dist[w] == kUnreachable) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[u] + 1) sigma[w] += sigma[u];
            }
        }
    };

    std::vector<std::vector<std::uint32_t>> rdist(n);
    std::vector<std::vector<double>> rsigma(n);
    for (std::size_t t = 0; t < n; ++t) count_from(reverse, t, rdist[t], rsigma[t]);

    std::vector<double> score(n, 0.0);
    std::vector<std::uint32_t> dist;
    std::vector<double> sigma;
    for (std::size_t s = 0; s < n; ++s) {
        count_from(forward, s, dist, sigma);
        for (std::size_t t = 0; t < n; ++t) {
            if (t == s || dist[t] == kUnreachable || dist[t] == 0) continue;
            const double sigma_st = sigma[t];
            for (std::size_t v = 0; v < n; ++v) {
                if (v == s || v == t) continue;
                if (dist[v] == kUnreachable || rdist[t][v] == kUnreachable) continue;
                if (dist[v] + rdist[t][v] != dist[t]) continue;
                score[v] += sigma[v] * rsigma[t][v] / sigma_st;
            }
        }
    }

    std::map<std::string, double> scores;
    for (std::size_t v = 0; v < n; ++v) scores[model.node_name(v)] = score[v];
    return scores;
}

}  // namespace pathcent
