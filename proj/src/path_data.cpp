#include "pathcent/path_data.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <stack>

#include "pathcent/errors.hpp"
#include "pathcent/rng.hpp"
#include "pathcent/text.hpp"

namespace pathcent {

namespace {

void require_valid_node(std::string_view token, std::size_t line) {
    if (token.empty())
        throw ParseError("empty node token", line);
    if (token.find(kPathSeparator) != std::string_view::npos ||
        token.find(kStateSeparator) != std::string_view::npos)
        throw ParseError("node identifier contains reserved character ',' or '|'", line);
}

std::uint64_t parse_frequency(std::string_view field, std::size_t line) {
    std::uint64_t value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("non-integer frequency '" + std::string(field) + "'", line);
    if (value < 1)
        throw ParseError("frequency < 1", line);
    return value;
}

std::int64_t parse_timestamp(std::string_view field, std::size_t line) {
    std::int64_t value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("non-integer timestamp '" + std::string(field) + "'", line);
    return value;
}

}  // namespace

bool operator==(const Path& a, const Path& b) {
    return a.frequency == b.frequency && a.nodes == b.nodes;
}

PathDataset PathDataset::from_paths(std::vector<Path> paths) {
    std::map<std::vector<std::string>, std::uint64_t> merged;
    for (auto& p : paths) {
        if (p.frequency == 0) continue;
        if (p.nodes.empty()) throw Error("path with empty node sequence");
        merged[std::move(p.nodes)] += p.frequency;
    }
    PathDataset ds;
    std::set<std::string> universe;
    for (auto& [nodes, freq] : merged) {
        ds.total_ += freq;
        ds.max_length_ = std::max(ds.max_length_, nodes.size());
        universe.insert(nodes.begin(), nodes.end());
        ds.paths_.push_back(Path{nodes, freq});
    }
    ds.universe_.assign(universe.begin(), universe.end());
    return ds;
}

double PathDataset::mean_length() const {
    if (total_ == 0) return 0.0;
    double sum = 0.0;
    for (const auto& p : paths_) sum += static_cast<double>(p.length()) * static_cast<double>(p.frequency);
    return sum / static_cast<double>(total_);
}

double PathDataset::median_length() const {
    if (total_ == 0) return 0.0;
    std::vector<std::pair<std::size_t, std::uint64_t>> lengths;
    lengths.reserve(paths_.size());
    for (const auto& p : paths_) lengths.emplace_back(p.length(), p.frequency);
    std::sort(lengths.begin(), lengths.end());

    auto nth = [&](std::uint64_t rank) {  // 1-based rank in the expanded multiset
        std::uint64_t seen = 0;
        for (const auto& [len, freq] : lengths) {
            seen += freq;
            if (seen >= rank) return len;
        }
        return lengths.back().first;
    };
    if (total_ % 2 == 1) return static_cast<double>(nth(total_ / 2 + 1));
    return (static_cast<double>(nth(total_ / 2)) + static_cast<double>(nth(total_ / 2 + 1))) / 2.0;
}

PathDataset parse_path_file(std::istream& in) {
    std::vector<Path> paths;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string_view rest = line;
        std::uint64_t freq = 1;
        const std::size_t tab = rest.find('\t');
        if (tab != std::string_view::npos) {
            std::string_view freq_field = rest.substr(tab + 1);
            if (freq_field.find('\t') != std::string_view::npos)
                throw ParseError("more than one tab-separated field", lineno);
            freq = parse_frequency(freq_field, lineno);
            rest = rest.substr(0, tab);
        }

        Path p;
        p.frequency = freq;
        for (const auto& token : text::split(rest, kPathSeparator)) {
            require_valid_node(token, lineno);
            p.nodes.push_back(token);
        }
        paths.push_back(std::move(p));
    }
    return PathDataset::from_paths(std::move(paths));
}

PathDataset parse_path_file(const std::string& text) {
    std::istringstream in(text);
    return parse_path_file(in);
}

void write_path_file(const PathDataset& ds, std::ostream& out) {
    for (const auto& p : ds.paths()) {
        out << text::join(p.nodes, kPathSeparator);
        if (p.frequency != 1) out << '\t' << p.frequency;
        out << '\n';
    }
}

std::string to_path_file(const PathDataset& ds) {
    std::ostringstream out;
    write_path_file(ds, out);
    return out.str();
}

TemporalNetwork parse_temporal_csv(std::istream& in) {
    TemporalNetwork net;
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (text::trim(line) != "source,target,timestamp")
                throw ParseError("expected header 'source,target,timestamp'", lineno);
            saw_header = true;
            continue;
        }
        const auto fields = text::split(line, ',');
        if (fields.size() != 3)
            throw ParseError("expected 3 comma-separated fields", lineno);
        TemporalEdge e;
        e.source = std::string(text::trim(fields[0]));
        e.target = std::string(text::trim(fields[1]));
        require_valid_node(e.source, lineno);
        require_valid_node(e.target, lineno);
        e.timestamp = parse_timestamp(text::trim(fields[2]), lineno);
        net.edges.push_back(std::move(e));
    }
    if (!saw_header) throw ParseError("empty input: missing header");
    return net;
}

TemporalNetwork parse_temporal_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_temporal_csv(in);
}

PathDataset extract_paths(const TemporalNetwork& net, std::int64_t delta,
                          std::optional<std::uint64_t> max_paths) {
    if (delta < 0) throw ArgumentError("delta must be non-negative");
    if (max_paths && *max_paths == 0) throw ArgumentError("max_paths must be positive");

    // Canonical edge-occurrence order so the result is independent of the
    // input permutation.
    std::vector<std::size_t> order(net.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = net.edges[a];
        const auto& eb = net.edges[b];
        return std::tie(ea.timestamp, ea.source, ea.target) <
               std::tie(eb.timestamp, eb.source, eb.target);
    });

    const std::size_t m = order.size();
    std::vector<const TemporalEdge*> edges(m);
    for (std::size_t i = 0; i < m; ++i) edges[i] = &net.edges[order[i]];

    // Occurrences grouped by source node, sorted by timestamp, for
    // successor range lookups.
    std::map<std::string, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < m; ++i) by_source[edges[i]->source].push_back(i);
    for (auto& [node, list] : by_source)
        std::sort(list.begin(), list.end(),
                  [&](std::size_t a, std::size_t b) { return edges[a]->timestamp < edges[b]->timestamp; });

    std::vector<std::vector<std::size_t>> successors(m);
    std::vector<bool> has_pred(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const auto it = by_source.find(edges[i]->target);
        if (it == by_source.end()) continue;
        const auto& cands = it->second;
        const std::int64_t t = edges[i]->timestamp;
        auto lo = std::upper_bound(cands.begin(), cands.end(), t,
                                   [&](std::int64_t v, std::size_t e) { return v < edges[e]->timestamp; });
        for (auto jt = lo; jt != cands.end(); ++jt) {
            if (edges[*jt]->timestamp - t > delta) break;
            successors[i].push_back(*jt);
            has_pred[*jt] = true;
        }
    }

    std::vector<Path> result;
    std::uint64_t emitted = 0;
    // Iterative DFS over root-to-leaf paths in the causal DAG.
    for (std::size_t root = 0; root < m; ++root) {
        if (has_pred[root]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack;  // (edge, next successor slot)
        stack.emplace_back(root, 0);
        std::vector<std::string> nodes{edges[root]->source, edges[root]->target};
        while (!stack.empty()) {
            auto& [cur, slot] = stack.back();
            if (successors[cur].empty()) {
                if (max_paths && emitted == *max_paths)
                    throw ResourceError("time-respecting path extraction exceeds max_paths=" +
                                        std::to_string(*max_paths));
                ++emitted;
                result.push_back(Path{nodes, 1});
                stack.pop_back();
                nodes.pop_back();
                continue;
            }
            if (slot < successors[cur].size()) {
                const std::size_t nxt = successors[cur][slot];
                ++slot;
                stack.emplace_back(nxt, 0);
                nodes.push_back(edges[nxt]->target);
            } else {
                stack.pop_back();
                nodes.pop_back();
            }
        }
    }
    return PathDataset::from_paths(std::move(result));
}

std::pair<PathDataset, PathDataset> split(const PathDataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ArgumentError("train_fraction must lie strictly between 0 and 1");
    if (ds.total_paths() < 2)
        throw ArgumentError("dataset must contain at least 2 path observations");

    rng::Engine eng(rng::derive_seed(spec.seed, spec.repetition_index));
    std::vector<Path> train;
    std::vector<Path> test;
    for (const auto& p : ds.paths()) {
        std::uint64_t n_train = 0;
        for (std::uint64_t k = 0; k < p.frequency; ++k)
            if (eng.uniform() < spec.train_fraction) ++n_train;
        if (n_train > 0) train.push_back(Path{p.nodes, n_train});
        if (n_train < p.frequency) test.push_back(Path{p.nodes, p.frequency - n_train});
    }
    if (train.empty() || test.empty())
        throw SplitError("split produced an empty train or test set; retry with a new repetition index");
    return {PathDataset::from_paths(std::move(train)), PathDataset::from_paths(std::move(test))};
}

std::string state_name(const std::vector<std::string>& nodes) {
    return text::join(nodes, kStateSeparator);
}

std::vector<std::string> state_tuple(const std::string& name) {
    return text::split(name, kStateSeparator);
}

std::vector<std::string> window_states(const std::vector<std::string>& nodes, int order) {
    if (order < 1) throw ArgumentError("window order must be >= 1");
    const std::size_t l = nodes.size();
    const std::size_t h = static_cast<std::size_t>(order);
    std::vector<std::string> states;
    states.reserve(l);
    std::string acc;
    for (std::size_t i = 0; i < std::min(l, h); ++i) {  // growing prefix states
        if (i > 0) acc.push_back(kStateSeparator);
        acc += nodes[i];
        states.push_back(acc);
    }
    for (std::size_t start = 1; start + h <= l; ++start) {  // sliding windows of width h
        std::string w = nodes[start];
        for (std::size_t i = start + 1; i < start + h; ++i) {
            w.push_back(kStateSeparator);
            w += nodes[i];
        }
        states.push_back(std::move(w));
    }
    return states;
}

PathDataset window_sequences(const PathDataset& ds, int order) {
    if (order < 1) throw ArgumentError("window order must be >= 1");
    std::vector<Path> out;
    out.reserve(ds.paths().size());
    for (const auto& p : ds.paths())
        out.push_back(Path{window_states(p.nodes, order), p.frequency});
    return PathDataset::from_paths(std::move(out));
}

}  // namespace pathcent
