#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mogen/error.hpp"

namespace mogen {

using NodeId = std::string;
using Timestamp = std::int64_t;

/// Reserved labels of the initial and terminal states.
inline constexpr std::string_view kStartMarker = "*";
inline constexpr std::string_view kEndMarker = "†";

/// An ordered node sequence observed `count` times.
struct Path {
    std::vector<NodeId> nodes;
    std::uint64_t count = 1;
    std::optional<Timestamp> start_time;

    std::size_t length() const { return nodes.size(); }
};

inline void validate_node(const NodeId& node) {
    if (node.empty())
        throw DataError("empty node label");
    if (node == kStartMarker || node == kEndMarker)
        throw DataError("node label '" + node + "' is reserved");
}

/// Multiset of paths. Identical (sequence, start time) records are merged
/// and their multiplicities summed. Immutable after construction.
class PathDataset {
public:
    PathDataset() = default;

    explicit PathDataset(std::vector<Path> input) {
        std::map<std::pair<std::vector<NodeId>, std::optional<Timestamp>>, std::uint64_t> merged;
        std::set<NodeId> vocab;
        for (auto& p : input) {
            if (p.nodes.empty())
                throw DataError("path of length 0");
            if (p.count == 0)
                throw DataError("path multiplicity must be positive");
            for (const auto& v : p.nodes) {
                validate_node(v);
                vocab.insert(v);
            }
            merged[{std::move(p.nodes), p.start_time}] += p.count;
        }
        paths_.reserve(merged.size());
        for (auto& [key, count] : merged) {
            total_ += count;
            max_length_ = std::max(max_length_, key.first.size());
            paths_.push_back(Path{key.first, count, key.second});
        }
        vocabulary_.assign(vocab.begin(), vocab.end());
    }

    const std::vector<Path>& paths() const { return paths_; }
    /// Sorted node labels occurring on any path.
    const std::vector<NodeId>& vocabulary() const { return vocabulary_; }
    /// N: number of path instances, multiplicities included.
    std::uint64_t total_count() const { return total_; }
    std::size_t max_length() const { return max_length_; }
    bool empty() const { return paths_.empty(); }

    bool has_timestamps() const {
        return std::all_of(paths_.begin(), paths_.end(),
                           [](const Path& p) { return p.start_time.has_value(); });
    }

private:
    std::vector<Path> paths_;
    std::vector<NodeId> vocabulary_;
    std::uint64_t total_ = 0;
    std::size_t max_length_ = 0;
};

inline void require_nonempty(const PathDataset& ds) {
    if (ds.empty())
        throw DataError("empty dataset");
}

// ---------------------------------------------------------------------------
// Parsing

struct PathFileFormat {
    char delimiter = ',';
    /// Separates the node list from the optional count and timestamp fields.
    char suffix_separator = ';';
};

struct ParseResult {
    PathDataset dataset;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    s = trim(s);
    Int value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty())
        return std::nullopt;
    return value;
}

inline std::string where(std::string_view source, std::size_t line) {
    return std::string(source.empty() ? "<input>" : source) + ":" + std::to_string(line) + ": ";
}

} // namespace detail

/// Reads one path per line: `v1<d>v2<d>...[;count[;timestamp]]`.
/// Lines starting with '#' are comments.
inline ParseResult parse_paths(std::istream& in, const PathFileFormat& fmt = {},
                               std::string_view source = {}) {
    ParseResult result;
    std::vector<Path> paths;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = detail::trim(raw);
        if (line.empty()) {
            result.warnings.push_back(detail::where(source, lineno) + "empty line skipped");
            continue;
        }
        if (line.front() == '#')
            continue;
        const auto fields = detail::split(line, fmt.suffix_separator);
        if (fields.size() > 3)
            throw DataError(detail::where(source, lineno) + "too many '" +
                            std::string(1, fmt.suffix_separator) + "' fields");
        Path p;
        for (auto tok : detail::split(fields[0], fmt.delimiter)) {
            tok = detail::trim(tok);
            if (tok.empty())
                throw DataError(detail::where(source, lineno) + "empty node label");
            p.nodes.emplace_back(tok);
        }
        if (fields.size() >= 2) {
            auto count = detail::parse_int<std::uint64_t>(fields[1]);
            if (!count || *count == 0)
                throw DataError(detail::where(source, lineno) + "malformed count '" +
                                std::string(detail::trim(fields[1])) + "'");
            p.count = *count;
        }
        if (fields.size() == 3) {
            auto ts = detail::parse_int<Timestamp>(fields[2]);
            if (!ts)
                throw DataError(detail::where(source, lineno) + "malformed timestamp '" +
                                std::string(detail::trim(fields[2])) + "'");
            p.start_time = *ts;
        }
        try {
            for (const auto& v : p.nodes)
                validate_node(v);
        } catch (const DataError& e) {
            throw DataError(detail::where(source, lineno) + e.what());
        }
        paths.push_back(std::move(p));
    }
    if (paths.empty())
        throw DataError(detail::where(source, lineno) + "empty dataset");
    result.dataset = PathDataset(std::move(paths));
    return result;
}

/// Writes the canonical path format read by parse_paths.
inline void write_paths(std::ostream& out, const PathDataset& ds, const PathFileFormat& fmt = {}) {
    for (const auto& p : ds.paths()) {
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            if (i)
                out << fmt.delimiter;
            out << p.nodes[i];
        }
        out << fmt.suffix_separator << p.count;
        if (p.start_time)
            out << fmt.suffix_separator << *p.start_time;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Issue-labelled action logs

struct ActionRecord {
    std::string key;
    NodeId actor;
    Timestamp time = 0;
};

/// One path per key: actors ordered by time, ties kept in input order.
inline PathDataset paths_from_actions(const std::vector<ActionRecord>& records) {
    std::map<std::string, std::vector<const ActionRecord*>> groups;
    for (const auto& r : records) {
        if (r.key.empty())
            throw DataError("action record with empty key");
        groups[r.key].push_back(&r);
    }
    std::vector<Path> paths;
    paths.reserve(groups.size());
    for (auto& [key, group] : groups) {
        std::stable_sort(group.begin(), group.end(),
                         [](const ActionRecord* a, const ActionRecord* b) { return a->time < b->time; });
        Path p;
        p.start_time = group.front()->time;
        for (const auto* r : group)
            p.nodes.push_back(r->actor);
        paths.push_back(std::move(p));
    }
    return PathDataset(std::move(paths));
}

// ---------------------------------------------------------------------------
// Temporal networks

struct TemporalEdge {
    NodeId source;
    NodeId target;
    Timestamp time = 0;
};

/// Greedy time-respecting chaining. Edges are visited in ascending time
/// (input order on ties); an edge (u,w;t') extends the oldest open chain
/// that ends in u at time t with t < t' <= t + delta, otherwise it opens a
/// new chain. Every edge lands on exactly one emitted path.
inline PathDataset extract_paths(const std::vector<TemporalEdge>& edges, Timestamp delta) {
    if (delta <= 0)
        throw InvalidArgument("delta must be positive");
    struct Chain {
        std::vector<NodeId> nodes;
        Timestamp start;
        Timestamp last;
    };
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return edges[a].time < edges[b].time; });

    std::vector<Chain> chains;
    // open chains keyed by their current end node, ordered by creation
    std::map<NodeId, std::set<std::size_t>> open;
    for (const auto idx : order) {
        const auto& e = edges[idx];
        validate_node(e.source);
        validate_node(e.target);
        std::optional<std::size_t> chosen;
        if (auto it = open.find(e.source); it != open.end()) {
            auto& bucket = it->second;
            for (auto c = bucket.begin(); c != bucket.end();) {
                const auto& chain = chains[*c];
                if (chain.last + delta < e.time) {
                    c = bucket.erase(c); // can never be extended again
                    continue;
                }
                if (chain.last < e.time) {
                    chosen = *c;
                    bucket.erase(c);
                    break;
                }
                ++c;
            }
        }
        if (chosen) {
            auto& chain = chains[*chosen];
            chain.nodes.push_back(e.target);
            chain.last = e.time;
        } else {
            chosen = chains.size();
            chains.push_back(Chain{{e.source, e.target}, e.time, e.time});
        }
        open[e.target].insert(*chosen);
    }
    std::vector<Path> paths;
    paths.reserve(chains.size());
    for (auto& c : chains)
        paths.push_back(Path{std::move(c.nodes), 1, c.start});
    return PathDataset(std::move(paths));
}

namespace detail {

/// Reads `a,b,time` CSV rows; an unparsable first row is treated as a header.
template <typename Row, typename Make>
std::vector<Row> read_triples(std::istream& in, std::string_view source, Make make) {
    std::vector<Row> rows;
    std::string raw;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto fields = split(line, ',');
        const bool header_candidate = first;
        first = false;
        if (fields.size() != 3) {
            if (header_candidate)
                continue;
            throw DataError(where(source, lineno) + "expected 3 comma-separated fields");
        }
        const auto time = parse_int<Timestamp>(fields[2]);
        if (!time) {
            if (header_candidate)
                continue;
            throw DataError(where(source, lineno) + "malformed time '" +
                            std::string(trim(fields[2])) + "'");
        }
        const auto a = trim(fields[0]);
        const auto b = trim(fields[1]);
        if (a.empty() || b.empty())
            throw DataError(where(source, lineno) + "empty field");
        rows.push_back(make(std::string(a), std::string(b), *time));
    }
    if (rows.empty())
        throw DataError(where(source, lineno) + "empty dataset");
    return rows;
}

} // namespace detail

/// CSV `source,target,time`.
inline std::vector<TemporalEdge> parse_temporal_edges(std::istream& in, std::string_view source = {}) {
    return detail::read_triples<TemporalEdge>(in, source, [](std::string a, std::string b, Timestamp t) {
        return TemporalEdge{std::move(a), std::move(b), t};
    });
}

/// CSV `key,actor,time`.
inline std::vector<ActionRecord> parse_actions(std::istream& in, std::string_view source = {}) {
    return detail::read_triples<ActionRecord>(in, source, [](std::string a, std::string b, Timestamp t) {
        return ActionRecord{std::move(a), std::move(b), t};
    });
}

// ---------------------------------------------------------------------------
// Rolling windows

/// Half-open interval [start, start + length); consecutive windows are
/// `shift` apart.
struct TimeWindow {
    Timestamp start = 0;
    Timestamp length = 1;
    Timestamp shift = 1;

    Timestamp end() const { return start + length; }
    bool contains(Timestamp t) const { return start <= t && t < end(); }
};

struct WindowSlice {
    TimeWindow window;
    PathDataset paths;

    bool empty() const { return paths.empty(); }
};

/// Slices a timestamped dataset into overlapping windows. The first window
/// starts at the earliest start time rounded down to a multiple of `shift`;
/// windows are emitted (empty ones included) while their start does not
/// exceed the latest start time.
inline std::vector<WindowSlice> rolling_windows(const PathDataset& ds, Timestamp length, Timestamp shift) {
    if (length <= 0 || shift <= 0)
        throw InvalidArgument("window length and shift must be positive");
    require_nonempty(ds);
    if (!ds.has_timestamps())
        throw DataError("rolling windows require a start time on every path");
    Timestamp lo = *ds.paths().front().start_time;
    Timestamp hi = lo;
    for (const auto& p : ds.paths()) {
        lo = std::min(lo, *p.start_time);
        hi = std::max(hi, *p.start_time);
    }
    Timestamp anchor = lo / shift * shift;
    if (anchor > lo)
        anchor -= shift; // floor for negative timestamps

    std::vector<WindowSlice> out;
    for (Timestamp start = anchor; start <= hi; start += shift) {
        TimeWindow w{start, length, shift};
        std::vector<Path> members;
        for (const auto& p : ds.paths())
            if (w.contains(*p.start_time))
                members.push_back(p);
        out.push_back(WindowSlice{w, PathDataset(std::move(members))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summary statistics

struct DatasetStats {
    std::uint64_t total_paths = 0;
    std::uint64_t unique_paths = 0;
    double mean_len = 0.0;
    double median_len = 0.0;
    std::uint64_t n_nodes = 0;
    std::uint64_t n_links = 0;
};

/// Path lengths count nodes; unique paths ignore start times; links are
/// distinct ordered consecutive pairs.
inline DatasetStats stats(const PathDataset& ds) {
    require_nonempty(ds);
    DatasetStats s;
    std::set<std::vector<NodeId>> unique;
    std::set<std::pair<NodeId, NodeId>> links;
    std::map<std::size_t, std::uint64_t> length_hist;
    double length_sum = 0.0;
    for (const auto& p : ds.paths()) {
        unique.insert(p.nodes);
        length_hist[p.length()] += p.count;
        length_sum += static_cast<double>(p.length()) * static_cast<double>(p.count);
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            links.emplace(p.nodes[i], p.nodes[i + 1]);
    }
    s.total_paths = ds.total_count();
    s.unique_paths = unique.size();
    s.mean_len = length_sum / static_cast<double>(s.total_paths);
    s.n_nodes = ds.vocabulary().size();
    s.n_links = links.size();

    // weighted median; average of the two middle values for even N
    auto nth = [&](std::uint64_t rank) {
        std::uint64_t seen = 0;
        for (const auto& [len, count] : length_hist) {
            seen += count;
            if (seen > rank)
                return static_cast<double>(len);
        }
        return static_cast<double>(length_hist.rbegin()->first);
    };
    const auto n = s.total_paths;
    s.median_len = n % 2 == 1 ? nth(n / 2) : 0.5 * (nth(n / 2 - 1) + nth(n / 2));
    return s;
}

} // namespace mogen
