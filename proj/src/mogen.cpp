#include "pathcent/mogen.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pathcent/errors.hpp"
#include "pathcent/rng.hpp"
#include "pathcent/text.hpp"

namespace pathcent {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kSolveTolerance = 1e-9;
constexpr std::size_t kDenseLimit = 500;
constexpr std::uint64_t kSampleStepLimit = 1000000;

bool tuple_order_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::string describe_state(const std::vector<std::string>& tuple) {
    return state_name(tuple);
}

}  // namespace

std::optional<std::size_t> MogenModel::find_state(const std::string& name) const {
    auto it = state_index.find(name);
    if (it == state_index.end()) return std::nullopt;
    return it->second;
}

void MogenModel::validate() const {
    if (max_order < 1) throw Error("model order must be at least 1");
    const std::size_t n = states.size();
    if (state_names.size() != n || start.size() != n || absorb.size() != n ||
        transitions.size() != n) {
        throw Error("model arrays disagree on the number of states");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!tuple_order_less(states[i], states[i + 1])) {
            throw Error("model states are not in canonical order");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tuple = states[i];
        if (tuple.empty() || static_cast<int>(tuple.size()) > max_order) {
            throw Error("state " + describe_state(tuple) + " has an invalid order");
        }
        if (state_names[i] != state_name(tuple)) {
            throw Error("state name table is inconsistent at " + state_names[i]);
        }
        auto it = state_index.find(state_names[i]);
        if (it == state_index.end() || it->second != i) {
            throw Error("state index is inconsistent at " + state_names[i]);
        }
    }

    double start_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (start[i] < 0.0 || start[i] > 1.0) {
            throw Error("start probability out of range at " + state_names[i]);
        }
        if (start[i] > 0.0 && states[i].size() != 1) {
            throw Error("start probability on a state of order above one: " + state_names[i]);
        }
        start_sum += start[i];
    }
    if (std::abs(start_sum - 1.0) > kRowSumTolerance) {
        throw Error("start distribution does not sum to one (sum " +
                    text::format_double(start_sum) + ")");
    }

    for (std::size_t i = 0; i < n; ++i) {
        const int order = order_of(i);
        double row = absorb[i];
        if (absorb[i] < 0.0 || absorb[i] > 1.0) {
            throw Error("absorbing probability out of range at " + state_names[i]);
        }
        std::size_t previous = 0;
        bool first = true;
        for (const auto& [target, prob] : transitions[i]) {
            if (target >= n) throw Error("transition target out of range at " + state_names[i]);
            if (!first && target <= previous) {
                throw Error("transition row is not sorted at " + state_names[i]);
            }
            first = false;
            previous = target;
            if (prob < 0.0 || prob > 1.0) {
                throw Error("transition probability out of range at " + state_names[i]);
            }
            const auto& from = states[i];
            const auto& to = states[target];
            if (order < max_order) {
                const bool grows = to.size() == from.size() + 1 &&
                                   std::equal(from.begin(), from.end(), to.begin());
                if (!grows) {
                    throw Error("transition breaks the block structure: " + state_names[i] +
                                " -> " + state_names[target]);
                }
            } else {
                const bool shifts = static_cast<int>(to.size()) == max_order &&
                                    std::equal(from.begin() + 1, from.end(), to.begin());
                if (!shifts) {
                    throw Error("transition breaks the block structure: " + state_names[i] +
                                " -> " + state_names[target]);
                }
            }
            row += prob;
        }
        if (std::abs(row - 1.0) > kRowSumTolerance) {
            throw Error("row of [Q | R] does not sum to one at " + state_names[i] + " (sum " +
                        text::format_double(row) + ")");
        }
    }
}

namespace {

/// Shared tail of every constructor: canonical sort, name/index tables.
void finalize_states(MogenModel& model, std::vector<std::vector<std::string>> tuples) {
    std::sort(tuples.begin(), tuples.end(), tuple_order_less);
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    model.states = std::move(tuples);
    model.state_names.clear();
    model.state_index.clear();
    model.state_names.reserve(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        model.state_names.push_back(state_name(model.states[i]));
        if (!model.state_index.emplace(model.state_names.back(), i).second) {
            throw Error("duplicate state " + model.state_names.back());
        }
    }
    model.start.assign(model.states.size(), 0.0);
    model.absorb.assign(model.states.size(), 0.0);
    model.transitions.assign(model.states.size(), {});
}

}  // namespace

MogenModel MogenModel::from_probabilities(
    int max_order,
    const std::vector<std::vector<std::string>>& states,
    const std::map<std::string, double>& start,
    const std::map<std::string, std::map<std::string, double>>& transitions,
    const std::map<std::string, double>& absorb) {
    if (max_order < 1) throw ArgumentError("model order must be at least 1");
    MogenModel model;
    model.max_order = max_order;
    finalize_states(model, states);

    auto require = [&](const std::string& name) {
        auto idx = model.find_state(name);
        if (!idx) throw ArgumentError("unknown state " + name);
        return *idx;
    };
    for (const auto& [name, prob] : start) model.start[require(name)] = prob;
    for (const auto& [name, prob] : absorb) model.absorb[require(name)] = prob;
    for (const auto& [name, row] : transitions) {
        const std::size_t i = require(name);
        auto& out = model.transitions[i];
        out.reserve(row.size());
        for (const auto& [target, prob] : row) {
            if (prob == 0.0) continue;
            out.emplace_back(require(target), prob);
        }
        std::sort(out.begin(), out.end());
    }
    model.validate();
    return model;
}

MogenModel fit_mogen(const PathDataset& train, int max_order) {
    if (max_order < 1) throw ArgumentError("model order must be at least 1");
    if (train.empty()) throw ArgumentError("cannot fit a model on an empty dataset");

    // Collect the state set: the full node universe at order 1, plus every
    // state some encoded path passes through.
    std::vector<std::vector<std::string>> tuples;
    for (const auto& node : train.node_universe()) tuples.push_back({node});
    for (const auto& path : train.paths()) {
        for (const auto& state : window_states(path.nodes, max_order)) {
            tuples.push_back(state_tuple(state));
        }
    }

    MogenModel model;
    model.max_order = max_order;
    finalize_states(model, tuples);

    const std::size_t n = model.states.size();
    std::vector<std::uint64_t> start_counts(n, 0);
    std::vector<std::uint64_t> end_counts(n, 0);
    std::vector<std::map<std::size_t, std::uint64_t>> transition_counts(n);

    for (const auto& path : train.paths()) {
        const auto sequence = window_states(path.nodes, max_order);
        std::size_t previous = 0;
        for (std::size_t step = 0; step < sequence.size(); ++step) {
            const auto idx = model.find_state(sequence[step]);
            if (!idx) throw Error("encoded state missing from the state table");
            if (step == 0) {
                start_counts[*idx] += path.frequency;
            } else {
                transition_counts[previous][*idx] += path.frequency;
            }
            previous = *idx;
        }
        end_counts[previous] += path.frequency;
    }

    model.path_count = train.total_paths();
    model.start_counts = start_counts;
    model.end_counts = end_counts;
    model.transition_counts.assign(n, {});

    const double total_paths = static_cast<double>(model.path_count);
    for (std::size_t i = 0; i < n; ++i) {
        model.start[i] = static_cast<double>(start_counts[i]) / total_paths;
        std::uint64_t row_total = end_counts[i];
        for (const auto& [target, count] : transition_counts[i]) row_total += count;
        if (row_total == 0) {
            // A node nothing passes through: keep the row stochastic by
            // absorbing immediately. It carries no visit weight.
            model.absorb[i] = 1.0;
            continue;
        }
        const double denom = static_cast<double>(row_total);
        model.absorb[i] = static_cast<double>(end_counts[i]) / denom;
        auto& out = model.transitions[i];
        auto& out_counts = model.transition_counts[i];
        out.reserve(transition_counts[i].size());
        out_counts.reserve(transition_counts[i].size());
        for (const auto& [target, count] : transition_counts[i]) {
            out.emplace_back(target, static_cast<double>(count) / denom);
            out_counts.emplace_back(target, count);
        }
    }
    model.validate();
    return model;
}

// --- fundamental matrix ----------------------------------------------------

struct FundamentalMatrix::Impl {
    bool dense_mode = true;
    Eigen::MatrixXd a;  // I - Q, dense mode only
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_transposed;
    Eigen::SparseMatrix<double> sparse_a;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu_transposed;

    mutable bool have_dense = false;
    mutable std::vector<std::vector<double>> dense_f;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        if (dense_mode) return lu.solve(rhs);
        return sparse_lu.solve(rhs);
    }
    Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const {
        if (dense_mode) return lu_transposed.solve(rhs);
        return sparse_lu_transposed.solve(rhs);
    }
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
        return dense_mode ? Eigen::VectorXd(a * x) : Eigen::VectorXd(sparse_a * x);
    }
    Eigen::VectorXd multiply_transposed(const Eigen::VectorXd& x) const {
        return dense_mode ? Eigen::VectorXd(a.transpose() * x)
                          : Eigen::VectorXd(sparse_a.transpose() * x);
    }
};

const std::vector<std::vector<double>>& FundamentalMatrix::dense() const {
    if (!impl_->have_dense) {
        const auto n = static_cast<Eigen::Index>(n_);
        impl_->dense_f.assign(n_, std::vector<double>(n_, 0.0));
        // Solve (I - Q) f_j = e_j column by column; F has f_j as column j.
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            unit[j] = 1.0;
            Eigen::VectorXd column = impl_->solve(unit);
            unit[j] = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                impl_->dense_f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    column[i];
            }
        }
        impl_->have_dense = true;
    }
    return impl_->dense_f;
}

double FundamentalMatrix::residual_max() const {
    const auto& f = dense();
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd fm(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) fm(i, j) = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    Eigen::MatrixXd residual =
        impl_->dense_mode ? Eigen::MatrixXd(fm * impl_->a) : Eigen::MatrixXd(fm * impl_->sparse_a);
    residual -= Eigen::MatrixXd::Identity(n, n);
    return residual.cwiseAbs().maxCoeff();
}

FundamentalMatrix fundamental_matrix(const MogenModel& model) {
    model.validate();
    const std::size_t n = model.states.size();
    if (n == 0) throw ArgumentError("model has no states");

    // I - Q is invertible exactly when every state can reach the absorbing
    // state. Check by walking the reversed transition graph from every
    // state with positive absorbing probability.
    {
        std::vector<std::vector<std::size_t>> reverse(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [target, prob] : model.transitions[i]) {
                if (prob > 0.0) reverse[target].push_back(i);
            }
        }
        std::vector<char> reaches(n, 0);
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < n; ++i) {
            if (model.absorb[i] > 0.0) {
                reaches[i] = 1;
                queue.push_back(i);
            }
        }
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (const std::size_t u : reverse[v]) {
                if (!reaches[u]) {
                    reaches[u] = 1;
                    queue.push_back(u);
                }
            }
        }
        std::string stranded;
        int listed = 0;
        for (std::size_t i = 0; i < n && listed < 4; ++i) {
            if (!reaches[i]) {
                if (!stranded.empty()) stranded += ", ";
                stranded += model.state_names[i];
                ++listed;
            }
        }
        if (!stranded.empty()) {
            throw NumericalError(
                "I - Q is singular: no route to the absorbing state from " + stranded);
        }
    }

    FundamentalMatrix result;
    result.n_ = n;
    result.impl_ = std::make_shared<FundamentalMatrix::Impl>();
    auto& impl = *result.impl_;
    impl.dense_mode = n < kDenseLimit;

    const auto en = static_cast<Eigen::Index>(n);
    if (impl.dense_mode) {
        impl.a = Eigen::MatrixXd::Identity(en, en);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [target, prob] : model.transitions[i]) {
                impl.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(target)) -= prob;
            }
        }
        impl.lu.compute(impl.a);
        impl.lu_transposed.compute(impl.a.transpose());
    } else {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(n * 4);
        for (std::size_t i = 0; i < n; ++i) {
            double diagonal = 1.0;
            for (const auto& [target, prob] : model.transitions[i]) {
                if (target == i) {
                    diagonal -= prob;
                } else {
                    triplets.emplace_back(static_cast<int>(i), static_cast<int>(target), -prob);
                }
            }
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diagonal);
        }
        impl.sparse_a.resize(en, en);
        impl.sparse_a.setFromTriplets(triplets.begin(), triplets.end());
        impl.sparse_a.makeCompressed();
        impl.sparse_lu.compute(impl.sparse_a);
        if (impl.sparse_lu.info() != Eigen::Success) {
            throw NumericalError("sparse factorization of I - Q failed");
        }
        Eigen::SparseMatrix<double> transposed = impl.sparse_a.transpose();
        transposed.makeCompressed();
        impl.sparse_lu_transposed.compute(transposed);
        if (impl.sparse_lu_transposed.info() != Eigen::Success) {
            throw NumericalError("sparse factorization of (I - Q)^T failed");
        }
    }

    // S F, via the transposed system (I - Q)^T x = S.
    Eigen::VectorXd s(en);
    for (std::size_t i = 0; i < n; ++i) s[static_cast<Eigen::Index>(i)] = model.start[i];
    Eigen::VectorXd visits = impl.solve_transposed(s);
    const double visits_residual = (impl.multiply_transposed(visits) - s).cwiseAbs().maxCoeff();

    // F 1, the expected number of nodes still ahead of each state.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(en);
    Eigen::VectorXd sums = impl.solve(ones);
    const double sums_residual = (impl.multiply(sums) - ones).cwiseAbs().maxCoeff();

    if (visits_residual > kSolveTolerance || sums_residual > kSolveTolerance) {
        throw NumericalError("fundamental-matrix solve did not converge (residual " +
                             text::format_double(std::max(visits_residual, sums_residual)) + ")");
    }

    result.visits_.resize(n);
    result.row_sums_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ei = static_cast<Eigen::Index>(i);
        result.visits_[i] = visits[ei];
        result.row_sums_[i] = sums[ei];
    }
    return result;
}

std::map<std::string, double> expected_visits(const MogenModel& model,
                                              const FundamentalMatrix& f) {
    if (f.size() != model.states.size()) {
        throw ArgumentError("fundamental matrix does not match the model");
    }
    std::map<std::string, double> visits;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        visits[model.state_names[i]] = f.visits_from_start()[i];
    }
    return visits;
}

PathDataset sample_paths(const MogenModel& model, std::uint64_t count, std::uint64_t seed) {
    model.validate();
    if (count == 0) throw ArgumentError("sample count must be positive");

    rng::Engine engine(rng::derive_seed(seed, 0));
    std::vector<Path> paths;
    paths.reserve(count);

    for (std::uint64_t p = 0; p < count; ++p) {
        // Start state: scan the start distribution.
        double u = engine.uniform();
        std::size_t state = model.states.size();
        for (std::size_t i = 0; i < model.states.size(); ++i) {
            if (model.start[i] <= 0.0) continue;
            if (u < model.start[i]) {
                state = i;
                break;
            }
            u -= model.start[i];
            state = i;  // numerical residue lands on the last candidate
        }
        if (state == model.states.size()) throw NumericalError("start distribution is empty");

        Path path;
        path.nodes = model.states[state];
        for (std::uint64_t step = 0;; ++step) {
            if (step >= kSampleStepLimit) {
                throw ResourceError("sampled path exceeded " +
                                    std::to_string(kSampleStepLimit) + " nodes");
            }
            double v = engine.uniform();
            if (v < model.absorb[state]) break;
            v -= model.absorb[state];
            const auto& row = model.transitions[state];
            if (row.empty()) break;  // absorbing by residue
            std::size_t next = row.back().first;
            for (const auto& [target, prob] : row) {
                if (v < prob) {
                    next = target;
                    break;
                }
                v -= prob;
            }
            state = next;
            path.nodes.push_back(model.states[state].back());
        }
        paths.push_back(std::move(path));
    }
    return PathDataset::from_paths(std::move(paths));
}

// --- serialization ----------------------------------------------------------

namespace {

using nlohmann::json;

json probabilities_to_json(const MogenModel& model, const std::vector<double>& values) {
    json object = json::object();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0.0) object[model.state_names[i]] = values[i];
    }
    return object;
}

json counts_to_json(const MogenModel& model, const std::vector<std::uint64_t>& values) {
    json object = json::object();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0) object[model.state_names[i]] = values[i];
    }
    return object;
}

}  // namespace

std::string to_json(const MogenModel& model) {
    model.validate();
    json root;
    root["format"] = "path-model";
    root["version"] = 1;
    root["K"] = model.max_order;
    root["path_count"] = model.path_count;

    json states = json::array();
    for (const auto& tuple : model.states) states.push_back(tuple);
    root["states"] = states;

    root["S"] = probabilities_to_json(model, model.start);
    root["R"] = probabilities_to_json(model, model.absorb);

    json transitions = json::object();
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (model.transitions[i].empty()) continue;
        json row = json::object();
        for (const auto& [target, prob] : model.transitions[i]) {
            row[model.state_names[target]] = prob;
        }
        transitions[model.state_names[i]] = row;
    }
    root["Q"] = transitions;

    const bool have_counts = !model.start_counts.empty();
    if (have_counts) {
        root["start_counts"] = counts_to_json(model, model.start_counts);
        root["end_counts"] = counts_to_json(model, model.end_counts);
        json rows = json::object();
        for (std::size_t i = 0; i < model.states.size(); ++i) {
            if (model.transition_counts[i].empty()) continue;
            json row = json::object();
            for (const auto& [target, count] : model.transition_counts[i]) {
                row[model.state_names[target]] = count;
            }
            rows[model.state_names[i]] = row;
        }
        root["transition_counts"] = rows;
    }
    return root.dump(2) + "\n";
}

MogenModel model_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& error) {
        throw ParseError(std::string("invalid model file: ") + error.what());
    }
    try {
        if (!root.is_object()) throw ParseError("invalid model file: not an object");
        if (root.value("format", std::string()) != "path-model") {
            throw ParseError("invalid model file: unrecognized format marker");
        }
        if (root.value("version", 0) != 1) {
            throw ParseError("invalid model file: unsupported version");
        }

        MogenModel model;
        model.max_order = root.at("K").get<int>();
        model.path_count = root.at("path_count").get<std::uint64_t>();

        std::vector<std::vector<std::string>> tuples;
        for (const auto& entry : root.at("states")) {
            tuples.push_back(entry.get<std::vector<std::string>>());
        }
        finalize_states(model, std::move(tuples));

        auto require = [&](const std::string& name) {
            auto idx = model.find_state(name);
            if (!idx) throw ParseError("invalid model file: unknown state " + name);
            return *idx;
        };
        for (const auto& [name, value] : root.at("S").items()) {
            model.start[require(name)] = value.get<double>();
        }
        for (const auto& [name, value] : root.at("R").items()) {
            model.absorb[require(name)] = value.get<double>();
        }
        for (const auto& [name, row] : root.at("Q").items()) {
            const std::size_t i = require(name);
            auto& out = model.transitions[i];
            for (const auto& [target, prob] : row.items()) {
                out.emplace_back(require(target), prob.get<double>());
            }
            std::sort(out.begin(), out.end());
        }

        if (root.contains("start_counts")) {
            model.start_counts.assign(model.states.size(), 0);
            model.end_counts.assign(model.states.size(), 0);
            model.transition_counts.assign(model.states.size(), {});
            for (const auto& [name, value] : root.at("start_counts").items()) {
                model.start_counts[require(name)] = value.get<std::uint64_t>();
            }
            for (const auto& [name, value] : root.at("end_counts").items()) {
                model.end_counts[require(name)] = value.get<std::uint64_t>();
            }
            for (const auto& [name, row] : root.at("transition_counts").items()) {
                const std::size_t i = require(name);
                auto& out = model.transition_counts[i];
                for (const auto& [target, count] : row.items()) {
                    out.emplace_back(require(target), count.get<std::uint64_t>());
                }
                std::sort(out.begin(), out.end());
            }
        }

        model.validate();
        return model;
    } catch (const json::exception& error) {
        throw ParseError(std::string("invalid model file: ") + error.what());
    }
}

void save_model(const MogenModel& model, const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ResourceError("cannot open " + file + " for writing");
    out << to_json(model);
    if (!out) throw ResourceError("failed writing " + file);
}

MogenModel load_model(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ResourceError("cannot open " + file);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace pathcent
