#include <algorithm>
#include <cstdio>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "pathcent/errors.hpp"
#include "pathcent/mogen.hpp"
#include "pathcent/network_model.hpp"

using namespace pathcent;

namespace {

const PathDataset& toy() {
    static const PathDataset ds = parse_path_file("A,C,D,E\nB,C,D,F\n");
    return ds;
}

const MogenModel& toy_k2() {
    static const MogenModel model = fit_mogen(toy(), 2);
    return model;
}

double probability(const MogenModel& m, const std::string& from, const std::string& to) {
    const auto i = m.find_state(from);
    REQUIRE(i);
    for (const auto& [target, prob] : m.transitions[*i]) {
        if (m.state_names[target] == to) return prob;
    }
    return 0.0;
}

double start_of(const MogenModel& m, const std::string& state) {
    const auto i = m.find_state(state);
    REQUIRE(i);
    return m.start[*i];
}

double absorb_of(const MogenModel& m, const std::string& state) {
    const auto i = m.find_state(state);
    REQUIRE(i);
    return m.absorb[*i];
}

bool same_probabilities(const MogenModel& a, const MogenModel& b) {
    return a.max_order == b.max_order && a.states == b.states && a.start == b.start &&
           a.absorb == b.absorb && a.transitions == b.transitions;
}

/// The toy model written out by hand instead of fitted.
MogenModel hand_built_toy() {
    return MogenModel::from_probabilities(
        2,
        {{"A"}, {"B"}, {"C"}, {"D"}, {"E"}, {"F"},
         {"A", "C"}, {"B", "C"}, {"C", "D"}, {"D", "E"}, {"D", "F"}},
        {{"A", 0.5}, {"B", 0.5}},
        {{"A", {{"A|C", 1.0}}},
         {"B", {{"B|C", 1.0}}},
         {"A|C", {{"C|D", 1.0}}},
         {"B|C", {{"C|D", 1.0}}},
         {"C|D", {{"D|E", 0.5}, {"D|F", 0.5}}}},
        {{"C", 1.0}, {"D", 1.0}, {"E", 1.0}, {"F", 1.0}, {"D|E", 1.0}, {"D|F", 1.0}});
}

}  // namespace

TEST_SUITE_BEGIN("mogen");

TEST_CASE("fit: toy corpus at K=2, every probability by hand") {
    const auto& m = toy_k2();
    CHECK(m.max_order == 2);
    CHECK(m.path_count == 2);
    CHECK(m.state_names ==
          std::vector<std::string>{"A", "B", "C", "D", "E", "F", "A|C", "B|C", "C|D", "D|E",
                                   "D|F"});
    CHECK(start_of(m, "A") == 0.5);
    CHECK(start_of(m, "B") == 0.5);
    CHECK(probability(m, "A", "A|C") == 1.0);
    CHECK(probability(m, "A|C", "C|D") == 1.0);
    CHECK(probability(m, "C|D", "D|E") == 0.5);
    CHECK(probability(m, "C|D", "D|F") == 0.5);
    CHECK(absorb_of(m, "D|E") == 1.0);
    CHECK(absorb_of(m, "D|F") == 1.0);
    // Nodes never visited as order-1 states keep a row that only absorbs.
    CHECK(absorb_of(m, "C") == 1.0);
    CHECK(absorb_of(m, "E") == 1.0);
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("fit: repeated-node path builds a self-shifting state") {
    const auto m = fit_mogen(parse_path_file("A,A,A\n"), 2);
    CHECK(m.state_names == std::vector<std::string>{"A", "A|A"});
    CHECK(start_of(m, "A") == 1.0);
    CHECK(probability(m, "A", "A|A") == 1.0);
    CHECK(probability(m, "A|A", "A|A") == 0.5);
    CHECK(absorb_of(m, "A|A") == 0.5);
}

TEST_CASE("fit: length-1 paths produce an immediately absorbing model") {
    const auto m = fit_mogen(parse_path_file("A\t5\n"), 2);
    CHECK(m.state_names == std::vector<std::string>{"A"});
    CHECK(start_of(m, "A") == 1.0);
    CHECK(absorb_of(m, "A") == 1.0);
    CHECK(m.transitions[0].empty());
    CHECK(m.path_count == 5);
}

TEST_CASE("fit: invalid arguments") {
    CHECK_THROWS_AS(fit_mogen(toy(), 0), ArgumentError);
    CHECK_THROWS_AS(fit_mogen(PathDataset(), 2), ArgumentError);
}

TEST_CASE("fit: row sums hold at 1e-12 and validation passes on random corpora") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto ds = oracles::random_corpus(seed);
        for (const int k : {1, 2, 3}) {
            const auto m = fit_mogen(ds, k);
            CHECK_NOTHROW(m.validate());
            // Independent recheck of row-stochasticity.
            for (std::size_t i = 0; i < m.state_count(); ++i) {
                double row = m.absorb[i];
                for (const auto& [target, prob] : m.transitions[i]) row += prob;
                CHECK(std::abs(row - 1.0) <= 1e-12);
            }
            double total_start = 0.0;
            for (const double s : m.start) total_start += s;
            CHECK(std::abs(total_start - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("fit: invariant under path input order and frequency splitting") {
    std::vector<Path> paths = {{{"A", "C", "D", "E"}, 2},
                               {{"B", "C"}, 1},
                               {{"C", "D"}, 3},
                               {{"A", "C", "D"}, 1}};
    const auto reference = to_json(fit_mogen(PathDataset::from_paths(paths), 2));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(paths.begin(), paths.end(), rng);
        CHECK(to_json(fit_mogen(PathDataset::from_paths(paths), 2)) == reference);
    }
    // Splitting a frequency over duplicate lines changes nothing.
    const auto split_freq = parse_path_file("A,C\nA,C\t2\nB,C\n");
    const auto merged = parse_path_file("A,C\t3\nB,C\n");
    CHECK(to_json(fit_mogen(split_freq, 2)) == to_json(fit_mogen(merged, 2)));
}

TEST_CASE("from_probabilities reproduces the fitted toy model") {
    const auto hand = hand_built_toy();
    CHECK(same_probabilities(hand, toy_k2()));
}

TEST_CASE("validate: rejects broken models") {
    // Start mass on a higher-order state.
    CHECK_THROWS_AS(MogenModel::from_probabilities(
                        2, {{"A"}, {"B"}, {"A", "B"}}, {{"A|B", 1.0}},
                        {{"A", {{"A|B", 1.0}}}}, {{"B", 1.0}, {"A|B", 1.0}}),
                    Error);
    // Row sum off by more than 1e-12.
    CHECK_THROWS_AS(MogenModel::from_probabilities(
                        1, {{"A"}}, {{"A", 1.0}}, {}, {{"A", 0.5}}),
                    Error);
    // Start distribution that does not sum to 1.
    CHECK_THROWS_AS(MogenModel::from_probabilities(
                        1, {{"A"}}, {{"A", 0.25}}, {}, {{"A", 1.0}}),
                    Error);
    // Transition that is not a one-step extension of its source.
    CHECK_THROWS_AS(MogenModel::from_probabilities(
                        2, {{"A"}, {"B"}, {"B", "A"}}, {{"A", 1.0}},
                        {{"A", {{"B|A", 1.0}}}}, {{"B", 1.0}, {"B|A", 1.0}}),
                    Error);
    // Unknown state in a probability map.
    CHECK_THROWS_AS(MogenModel::from_probabilities(
                        1, {{"A"}}, {{"Z", 1.0}}, {}, {{"A", 1.0}}),
                    ArgumentError);
}

TEST_CASE("fundamental matrix: toy row of A|C sums to 3") {
    const auto f = fundamental_matrix(toy_k2());
    const auto& m = toy_k2();
    const std::size_t ac = *m.find_state("A|C");
    CHECK(f.row_sums()[ac] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.entry(ac, ac) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.entry(ac, *m.find_state("C|D")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.entry(ac, *m.find_state("D|E")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.entry(ac, *m.find_state("D|F")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.entry(ac, *m.find_state("B|C")) == 0.0);
    CHECK(f.residual_max() < 1e-9);
}

TEST_CASE("fundamental matrix: F = I when every state absorbs immediately") {
    const auto m = fit_mogen(parse_path_file("A\nB\t2\n"), 1);
    const auto f = fundamental_matrix(m);
    for (std::size_t i = 0; i < m.state_count(); ++i) {
        for (std::size_t j = 0; j < m.state_count(); ++j) {
            CHECK(f.entry(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("fundamental matrix: two-state certain chain") {
    const auto m = MogenModel::from_probabilities(1, {{"x"}, {"y"}}, {{"x", 1.0}},
                                                  {{"x", {{"y", 1.0}}}}, {{"y", 1.0}});
    const auto f = fundamental_matrix(m);
    const std::size_t x = *m.find_state("x");
    const std::size_t y = *m.find_state("y");
    CHECK(f.entry(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.entry(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.entry(y, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.entry(y, x) == 0.0);
}

TEST_CASE("fundamental matrix: residual within 1e-9 on random fitted models") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto m = oracles::random_model(seed);
        const auto f = fundamental_matrix(m);
        CHECK(f.residual_max() < 1e-9);
    }
}

TEST_CASE("fundamental matrix: a state cut off from the end is reported") {
    const auto m = MogenModel::from_probabilities(
        1, {{"x"}, {"y"}}, {{"x", 1.0}}, {{"x", {{"y", 1.0}}}, {"y", {{"y", 1.0}}}}, {});
    try {
        (void)fundamental_matrix(m);
        FAIL("expected NumericalError");
    } catch (const NumericalError& error) {
        CHECK(std::string(error.what()).find("y") != std::string::npos);
    }
}

TEST_CASE("expected visits: toy values from S*F by hand") {
    const auto& m = toy_k2();
    const auto visits = expected_visits(m, fundamental_matrix(m));
    const std::map<std::string, double> expected = {
        {"A", 0.5},  {"B", 0.5},  {"C", 0.0},   {"D", 0.0},   {"E", 0.0},  {"F", 0.0},
        {"A|C", 0.5}, {"B|C", 0.5}, {"C|D", 1.0}, {"D|E", 0.5}, {"D|F", 0.5}};
    REQUIRE(oracles::same_keys(visits, expected));
    CHECK(oracles::max_abs_diff(visits, expected) < 1e-12);
}

TEST_CASE("expected visits: deterministic single-path model visits once each") {
    const auto m = fit_mogen(parse_path_file("A,B,C\n"), 3);
    const auto visits = expected_visits(m, fundamental_matrix(m));
    CHECK(visits.at("A") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(visits.at("A|B") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(visits.at("A|B|C") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expected visits: totals equal the mean training path length at K=l_max") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto ds = oracles::random_corpus(seed);
        const auto m = fit_mogen(ds, static_cast<int>(ds.max_length()));
        const auto visits = expected_visits(m, fundamental_matrix(m));
        double total = 0.0;
        for (const auto& [state, value] : visits) total += value;
        CHECK(total == doctest::Approx(ds.mean_length()).epsilon(1e-9));
    }
}

TEST_CASE("Monte Carlo oracle: F rows of the toy model within 3 standard errors") {
    const auto& m = toy_k2();
    const auto f = fundamental_matrix(m);
    const std::uint64_t walks = 20000;
    for (std::size_t i = 0; i < m.state_count(); ++i) {
        const auto tally = oracles::random_walks(m, i, walks, 4242 + i);
        for (std::size_t j = 0; j < m.state_count(); ++j) {
            const double se =
                std::sqrt(oracles::visit_variance(f, i, j) / static_cast<double>(walks));
            CHECK(std::abs(tally.mean_visits[j] - f.entry(i, j)) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("Monte Carlo oracle: start-law visits and end probabilities") {
    const auto& m = toy_k2();
    const auto f = fundamental_matrix(m);
    const std::uint64_t walks = 100000;
    const auto tally = oracles::random_walks(m, oracles::kWalkFromStart, walks, 777);
    const auto& visits = f.visits_from_start();
    for (std::size_t j = 0; j < m.state_count(); ++j) {
        // Per-walk visit counts here are Bernoulli (every state is hit at
        // most once on toy walks), so the binomial error bound applies.
        const double p = visits[j];
        const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(walks));
        CHECK(std::abs(tally.mean_visits[j] - p) <= 3.0 * se + 1e-12);
        const double e = visits[j] * m.absorb[j];
        const double se_end =
            std::sqrt(std::max(e * (1.0 - e), 0.0) / static_cast<double>(walks));
        CHECK(std::abs(tally.end_fraction[j] - e) <= 3.0 * se_end + 1e-12);
    }
}

TEST_CASE("losslessness: K = l_max reproduces the training distribution") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto ds = oracles::random_corpus(seed);
        const auto m = fit_mogen(ds, static_cast<int>(ds.max_length()));
        const auto enumerated = oracles::enumerate_model_paths(m, ds.max_length() + 1);

        std::map<std::vector<std::string>, double> emitted;
        double total = 0.0;
        for (const auto& mp : enumerated) {
            emitted[mp.nodes] += mp.probability;
            total += mp.probability;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
        REQUIRE(emitted.size() == ds.unique_paths());
        const double n = static_cast<double>(ds.total_paths());
        for (const auto& p : ds.paths()) {
            const auto it = emitted.find(p.nodes);
            REQUIRE(it != emitted.end());
            CHECK(std::abs(it->second - static_cast<double>(p.frequency) / n) <= 1e-12);
        }
    }
}

TEST_CASE("serialization: spec field names, round trip, bit stability") {
    const auto& m = toy_k2();
    const std::string text = to_json(m);

    const auto root = nlohmann::json::parse(text);
    CHECK(root.at("K") == 2);
    CHECK(root.at("path_count") == 2);
    CHECK(root.at("S").at("A") == 0.5);
    CHECK(root.at("Q").at("C|D").at("D|E") == 0.5);
    CHECK(root.at("R").at("D|E") == 1.0);
    CHECK(root.at("states").size() == 11);

    const auto back = model_from_json(text);
    CHECK(same_probabilities(back, m));
    CHECK(back.start_counts == m.start_counts);
    CHECK(back.transition_counts == m.transition_counts);
    CHECK(to_json(back) == text);

    // Awkward probabilities survive bit-exactly.
    const auto odd = fit_mogen(parse_path_file("A,B\nA,C\nA,B,C\nB,C\nC,A\nB,A\nA,B\t2\n"), 2);
    const auto odd_back = model_from_json(to_json(odd));
    CHECK(same_probabilities(odd_back, odd));
    CHECK(to_json(odd_back) == to_json(odd));
}

TEST_CASE("serialization: random fitted models round trip byte-identically") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto m = oracles::random_model(seed);
        const std::string text = to_json(m);
        CHECK(to_json(model_from_json(text)) == text);
    }
}

TEST_CASE("serialization: file save and load") {
    const std::string file = "toy_model_roundtrip.json";
    save_model(toy_k2(), file);
    const auto back = load_model(file);
    CHECK(same_probabilities(back, toy_k2()));
    std::remove(file.c_str());
    CHECK_THROWS_AS(load_model("does_not_exist.json"), ResourceError);
    CHECK_THROWS_AS(model_from_json("not json at all"), ParseError);
    CHECK_THROWS_AS(model_from_json("{\"format\":\"something-else\"}"), ParseError);
}

TEST_CASE("sampling: deterministic for a seed, spread across seeds") {
    const auto& m = toy_k2();
    const auto a = sample_paths(m, 200, 12);
    const auto b = sample_paths(m, 200, 12);
    CHECK(a == b);
    CHECK(a.total_paths() == 200);
    const auto c = sample_paths(m, 200, 13);
    CHECK(a != c);
    // Only the two training sequences can ever be emitted.
    for (const auto& p : a.paths()) {
        const bool known = p.nodes == std::vector<std::string>{"A", "C", "D", "E"} ||
                           p.nodes == std::vector<std::string>{"A", "C", "D", "F"} ||
                           p.nodes == std::vector<std::string>{"B", "C", "D", "E"} ||
                           p.nodes == std::vector<std::string>{"B", "C", "D", "F"};
        CHECK(known);
    }
}

TEST_CASE("sampling: a deterministic model emits identical paths") {
    const auto m = fit_mogen(parse_path_file("A,B,C\n"), 3);
    const auto ds = sample_paths(m, 50, 99);
    REQUIRE(ds.unique_paths() == 1);
    CHECK(ds.paths()[0].nodes == std::vector<std::string>{"A", "B", "C"});
    CHECK(ds.paths()[0].frequency == 50);
}

TEST_CASE("sampling: endless models trip the step budget") {
    const auto m = MogenModel::from_probabilities(
        1, {{"x"}, {"y"}}, {{"x", 1.0}}, {{"x", {{"y", 1.0}}}, {"y", {{"y", 1.0}}}}, {});
    CHECK_THROWS_AS(sample_paths(m, 1, 3), ResourceError);
    CHECK_THROWS_AS(sample_paths(toy_k2(), 0, 3), ArgumentError);
}

TEST_CASE("K=1 transient topology equals the first-order network") {
    const auto d_net = all_pairs_distances(build_network(toy()));
    const auto d_m1 = all_pairs_distances(fit_mogen(toy(), 1));
    REQUIRE(d_net.states() == d_m1.states());
    for (std::size_t i = 0; i < d_net.size(); ++i) {
        for (std::size_t j = 0; j < d_net.size(); ++j) {
            CHECK(d_net.at(i, j) == d_m1.at(i, j));
        }
    }
}

TEST_CASE("sparse solver path: large model agrees with a dense solve") {
    // Enough distinct windows to push the state count past the dense
    // cutoff of 500.
    std::mt19937_64 rng(2024);
    std::vector<Path> paths;
    for (int i = 0; i < 250; ++i) {
        Path p;
        for (int j = 0; j < 6; ++j) {
            p.nodes.push_back(
                oracles::node_label(std::uniform_int_distribution<int>(0, 25)(rng)));
        }
        paths.push_back(std::move(p));
    }
    const auto ds = PathDataset::from_paths(std::move(paths));
    const auto m = fit_mogen(ds, 3);
    REQUIRE(m.state_count() > 500);
    const auto f = fundamental_matrix(m);
    CHECK(f.residual_max() < 1e-9);

    // Independent dense route: assemble I - Q and solve with Eigen.
    const auto n = static_cast<Eigen::Index>(m.state_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < m.state_count(); ++i) {
        for (const auto& [target, prob] : m.transitions[i]) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(target)) -= prob;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd rows = lu.solve(ones);
    Eigen::VectorXd s(n);
    for (std::size_t i = 0; i < m.state_count(); ++i) {
        s(static_cast<Eigen::Index>(i)) = m.start[i];
    }
    const Eigen::VectorXd visits = a.transpose().partialPivLu().solve(s);
    for (std::size_t i = 0; i < m.state_count(); ++i) {
        CHECK(std::abs(f.row_sums()[i] - rows(static_cast<Eigen::Index>(i))) < 1e-9);
        CHECK(std::abs(f.visits_from_start()[i] - visits(static_cast<Eigen::Index>(i))) < 1e-9);
    }
}

TEST_SUITE_END();
