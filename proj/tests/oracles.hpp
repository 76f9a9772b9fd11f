#pragma once

// Independent oracles and input generators shared by the unit tests and
// the acceptance binary. Everything here recomputes results from first
// principles (exhaustive enumeration, textbook algorithms, Monte Carlo
// sampling with the standard library's generator) so that agreement with
// the library is evidence, not tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathcent/mogen.hpp"
#include "pathcent/network_model.hpp"
#include "pathcent/path_data.hpp"

namespace oracles {

// --- map helpers ---------------------------------------------------------

inline bool same_keys(const std::map<std::string, double>& a,
                      const std::map<std::string, double>& b) {
    if (a.size() != b.size()) return false;
    auto ita = a.begin();
    auto itb = b.begin();
    for (; ita != a.end(); ++ita, ++itb) {
        if (ita->first != itb->first) return false;
    }
    return true;
}

/// Largest absolute difference over the union of keys; a key missing on
/// either side counts as infinite.
inline double max_abs_diff(const std::map<std::string, double>& a,
                           const std::map<std::string, double>& b) {
    if (!same_keys(a, b)) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    auto itb = b.begin();
    for (auto ita = a.begin(); ita != a.end(); ++ita, ++itb) {
        worst = std::max(worst, std::abs(ita->second - itb->second));
    }
    return worst;
}

// --- graph oracles -------------------------------------------------------

/// Dense adjacency of a network model, indexed like model.nodes().
inline std::vector<std::vector<bool>> adjacency_of(const pathcent::NetworkModel& model) {
    const std::size_t n = model.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::size_t w : model.out_neighbors(i)) adj[i][w] = true;
    }
    return adj;
}

/// Floyd-Warshall hop distances; the oracle for the BFS implementation.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(
    const std::vector<std::vector<bool>>& adj) {
    const std::size_t n = adj.size();
    const std::uint32_t inf = pathcent::kUnreachable;
    std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && adj[i][j]) d[i][j] = 1;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (d[i][k] == inf) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (d[k][j] == inf) continue;
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    }
    return d;
}

/// Betweenness by exhaustive enumeration of every shortest path. The
/// per-pair fractions are accumulated in ascending (s, t, v) index order
/// with an integer numerator, mirroring the summation order of the
/// implementation, so agreement can be required bitwise.
inline std::map<std::string, double> brute_betweenness(const pathcent::NetworkModel& model) {
    const std::size_t n = model.size();
    const auto adj = adjacency_of(model);
    const auto dist = floyd_warshall(adj);
    const std::uint32_t inf = pathcent::kUnreachable;

    std::vector<double> score(n, 0.0);
    std::vector<std::uint64_t> through(n, 0);
    std::vector<std::size_t> stack;

    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || dist[s][t] == inf || dist[s][t] == 0) continue;
            std::fill(through.begin(), through.end(), 0);
            std::uint64_t total = 0;
            stack.assign(1, s);
            // Depth-first walk over exactly the shortest s->t paths: each
            // step must advance the BFS layer and stay on a geodesic.
            std::function<void(std::size_t)> walk = [&](std::size_t u) {
                if (u == t) {
                    ++total;
                    for (std::size_t k = 1; k + 1 < stack.size(); ++k) ++through[stack[k]];
                    return;
                }
                for (std::size_t w = 0; w < n; ++w) {
                    if (!adj[u][w]) continue;
                    if (dist[s][w] != dist[s][u] + 1) continue;
                    if (dist[w][t] == inf || dist[s][w] + dist[w][t] != dist[s][t]) continue;
                    stack.push_back(w);
                    walk(w);
                    stack.pop_back();
                }
            };
            walk(s);
            for (std::size_t v = 0; v < n; ++v) {
                if (v == s || v == t || through[v] == 0) continue;
                score[v] += static_cast<double>(through[v]) / static_cast<double>(total);
            }
        }
    }

    std::map<std::string, double> result;
    for (std::size_t v = 0; v < n; ++v) result[model.node_name(v)] = score[v];
    return result;
}

// --- Monte Carlo walker ---------------------------------------------------

/// Per-state tallies from independent random walks over a model, using
/// std::mt19937_64 directly — a second route, sharing nothing with the
/// library's sampler.
struct WalkTally {
    std::vector<double> mean_visits;   // per walk, indexed like model states
    std::vector<double> end_fraction;  // fraction of walks absorbed at the state
    std::uint64_t walks = 0;
};

inline constexpr std::size_t kWalkFromStart = static_cast<std::size_t>(-1);

/// Walks start at `source`, or are drawn from the start distribution S
/// when source == kWalkFromStart.
inline WalkTally random_walks(const pathcent::MogenModel& model, std::size_t source,
                              std::uint64_t walks, std::uint64_t seed) {
    const std::size_t n = model.state_count();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<double> visits(n, 0.0);
    std::vector<double> ends(n, 0.0);
    for (std::uint64_t w = 0; w < walks; ++w) {
        std::size_t state = source;
        if (source == kWalkFromStart) {
            double x = unif(rng);
            state = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (model.start[i] <= 0.0) continue;
                state = i;  // numeric residue lands on the last candidate
                x -= model.start[i];
                if (x < 0.0) break;
            }
            if (state == n) throw std::runtime_error("walk oracle: empty start distribution");
        }
        for (std::uint64_t step = 0;; ++step) {
            if (step > 1000000) throw std::runtime_error("walk oracle: step bound exceeded");
            visits[state] += 1.0;
            double x = unif(rng);
            if (x < model.absorb[state]) {
                ends[state] += 1.0;
                break;
            }
            x -= model.absorb[state];
            std::size_t next = n;
            for (const auto& [target, prob] : model.transitions[state]) {
                if (prob <= 0.0) continue;
                next = target;
                x -= prob;
                if (x < 0.0) break;
            }
            if (next == n) {  // numeric residue on a row that only absorbs
                ends[state] += 1.0;
                break;
            }
            state = next;
        }
    }

    WalkTally tally;
    tally.walks = walks;
    tally.mean_visits.resize(n);
    tally.end_fraction.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        tally.mean_visits[i] = visits[i] / static_cast<double>(walks);
        tally.end_fraction[i] = ends[i] / static_cast<double>(walks);
    }
    return tally;
}

/// Variance of the number of visits to state j for a walk starting at i,
/// from the standard absorbing-chain identity Var = F_ij (2 F_jj - 1) - F_ij^2.
inline double visit_variance(const pathcent::FundamentalMatrix& f, std::size_t i, std::size_t j) {
    const double fij = f.entry(i, j);
    const double fjj = f.entry(j, j);
    return std::max(0.0, fij * (2.0 * fjj - 1.0) - fij * fij);
}

// --- exhaustive model-path enumeration ------------------------------------

/// A positive-probability node sequence of a model.
struct ModelPath {
    std::vector<std::string> nodes;
    double probability = 0.0;
};

/// Enumerates every node sequence the model can emit, with its exact
/// probability. Only safe on models whose transient topology is acyclic
/// (anything fitted with K = l_max); the length bound trips otherwise.
inline std::vector<ModelPath> enumerate_model_paths(const pathcent::MogenModel& model,
                                                    std::size_t max_len = 64) {
    std::vector<ModelPath> out;
    std::vector<std::string> nodes;
    std::function<void(std::size_t, double)> expand = [&](std::size_t state, double prob) {
        if (nodes.size() > max_len) {
            throw std::runtime_error("model path enumeration exceeded the length bound");
        }
        if (model.absorb[state] > 0.0) out.push_back({nodes, prob * model.absorb[state]});
        for (const auto& [target, p] : model.transitions[state]) {
            if (p <= 0.0) continue;
            nodes.push_back(model.states[target].back());
            expand(target, prob * p);
            nodes.pop_back();
        }
    };
    for (std::size_t i = 0; i < model.state_count(); ++i) {
        if (model.start[i] <= 0.0) continue;
        nodes = model.states[i];  // a start state has order 1
        expand(i, model.start[i]);
    }
    return out;
}

// --- random input generators ----------------------------------------------

inline std::string node_label(int v) { return std::string(1, static_cast<char>('a' + v)); }

/// Random path corpus: up to max_nodes distinct nodes, up to max_paths
/// unique sequences of length 1..max_len with small frequencies.
inline pathcent::PathDataset random_corpus(std::uint64_t seed, int max_nodes = 8,
                                           int max_paths = 50, int max_len = 6) {
    std::mt19937_64 rng(seed);
    const int nodes = std::uniform_int_distribution<int>(2, max_nodes)(rng);
    const int paths = std::uniform_int_distribution<int>(1, max_paths)(rng);
    std::vector<pathcent::Path> out;
    out.reserve(static_cast<std::size_t>(paths));
    for (int i = 0; i < paths; ++i) {
        pathcent::Path p;
        const int len = std::uniform_int_distribution<int>(1, max_len)(rng);
        for (int j = 0; j < len; ++j) {
            p.nodes.push_back(node_label(std::uniform_int_distribution<int>(0, nodes - 1)(rng)));
        }
        p.frequency =
            static_cast<std::uint64_t>(std::uniform_int_distribution<int>(1, 3)(rng));
        out.push_back(std::move(p));
    }
    return pathcent::PathDataset::from_paths(std::move(out));
}

/// Random digraph as a dataset of single-edge paths (so it can feed the
/// network model); guaranteed to contain at least one edge. Nodes without
/// incident edges do not exist for the model, which is fine for oracle
/// comparisons because both sides see the same node set.
inline pathcent::PathDataset random_digraph_dataset(std::uint64_t seed, int max_nodes,
                                                    double edge_probability) {
    std::mt19937_64 rng(seed);
    const int n = std::uniform_int_distribution<int>(2, max_nodes)(rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<pathcent::Path> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && unif(rng) < edge_probability) {
                edges.push_back({{node_label(i), node_label(j)}, 1});
            }
        }
    }
    if (edges.empty()) edges.push_back({{node_label(0), node_label(1)}, 1});
    return pathcent::PathDataset::from_paths(std::move(edges));
}

/// Random fitted model with at most `max_states` states (smaller corpora
/// are retried deterministically until the bound holds).
inline pathcent::MogenModel random_model(std::uint64_t seed, std::size_t max_states = 50) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t sub_seed = seed * 1000003ULL + attempt;
        const auto corpus = random_corpus(sub_seed, 6, 12, 5);
        const int max_order = 1 + static_cast<int>((seed + attempt) % 3);
        auto model = pathcent::fit_mogen(corpus, max_order);
        if (model.state_count() <= max_states) return model;
    }
}

/// Draws `count` of the dataset's observations (counting multiplicity)
/// uniformly without replacement; deterministic for a seed.
inline pathcent::PathDataset subsample(const pathcent::PathDataset& ds, std::uint64_t count,
                                       std::uint64_t seed) {
    const std::uint64_t total = ds.total_paths();
    if (count == 0 || count > total) {
        throw std::runtime_error("subsample: count must be in [1, total observations]");
    }
    std::vector<std::uint64_t> observations(total);
    for (std::uint64_t i = 0; i < total; ++i) observations[i] = i;
    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < count; ++i) {  // partial Fisher-Yates
        const std::uint64_t j =
            i + std::uniform_int_distribution<std::uint64_t>(0, total - 1 - i)(rng);
        std::swap(observations[i], observations[j]);
    }
    observations.resize(count);
    std::sort(observations.begin(), observations.end());

    std::vector<pathcent::Path> picked;
    std::size_t path_index = 0;
    std::uint64_t covered = 0;  // observations strictly below paths()[path_index]
    for (const std::uint64_t obs : observations) {
        while (covered + ds.paths()[path_index].frequency <= obs) {
            covered += ds.paths()[path_index].frequency;
            ++path_index;
        }
        if (!picked.empty() && picked.back().nodes == ds.paths()[path_index].nodes) {
            ++picked.back().frequency;
        } else {
            picked.push_back({ds.paths()[path_index].nodes, 1});
        }
    }
    return pathcent::PathDataset::from_paths(std::move(picked));
}

}  // namespace oracles
