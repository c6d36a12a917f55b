#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mogen/centrality.hpp"
#include "mogen/error.hpp"
#include "mogen/models.hpp"
#include "mogen/pathdata.hpp"

namespace mogen {

using Series = std::vector<std::optional<double>>;

/// Per-window first-order centralities of one development platform.
/// A member has a value in window t iff it occurs on a path of that window;
/// empty windows have no values and no means.
struct PlatformSeries {
    std::string platform;
    std::vector<TimeWindow> windows;
    std::vector<Measure> measures;
    /// Maximum order fitted per window, 0 for empty windows.
    std::vector<std::size_t> orders;
    std::map<NodeId, std::map<Measure, Series>> values;
    /// Mean over the members active in each window.
    std::map<Measure, Series> means;

    std::set<NodeId> members() const {
        std::set<NodeId> out;
        for (const auto& [m, v] : values)
            out.insert(m);
        return out;
    }
    bool active(const NodeId& member, std::size_t t) const {
        auto it = values.find(member);
        return it != values.end() && !it->second.empty() && it->second.begin()->second[t].has_value();
    }
};

struct WindowModelOptions {
    /// Fixed maximum order; when unset each window selects its own order.
    std::optional<std::size_t> K;
    std::size_t K_max = 3;
    CentralityOptions centrality;
};

/// Fits one MOGen model per non-empty window and records first-order
/// centralities of every member for each requested measure.
inline PlatformSeries windowed_centralities(const std::vector<WindowSlice>& windows,
                                            const std::vector<Measure>& measures, const WindowModelOptions& opts = {},
                                            std::string platform = {}) {
    if (std::all_of(windows.begin(), windows.end(), [](const WindowSlice& w) { return w.empty(); }))
        throw DataError("all windows are empty");
    PlatformSeries out;
    out.platform = std::move(platform);
    out.measures = measures;
    const std::size_t T = windows.size();
    for (auto m : measures)
        out.means[m] = Series(T);
    for (std::size_t t = 0; t < T; ++t) {
        out.windows.push_back(windows[t].window);
        if (windows[t].empty()) {
            out.orders.push_back(0);
            continue;
        }
        const auto& ds = windows[t].paths;
        const std::size_t K = opts.K ? *opts.K : select_order(ds, opts.K_max);
        out.orders.push_back(K);
        const auto model = fit_mogen(ds, K);
        const MOGenCentrality mc(model, opts.centrality);
        for (auto m : measures) {
            const auto vec = mc.nodes(m);
            double sum = 0.0;
            for (const auto& [state, score] : vec.scores) {
                auto& series = out.values[state.front()][m];
                if (series.empty())
                    series.resize(T);
                series[t] = score;
                sum += score;
            }
            out.means[m][t] = sum / static_cast<double>(vec.scores.size());
        }
    }
    // members seen only in later windows still need full-length series
    for (auto& [member, by_measure] : out.values)
        for (auto m : measures)
            by_measure[m].resize(T);
    return out;
}

// ---------------------------------------------------------------------------
// Deviation scores

struct DeviationOptions {
    /// Terms whose team mean is below epsilon in magnitude are skipped.
    double epsilon = 1e-9;
    /// Count windows where the member is absent as value 0 instead of skipping them.
    bool strict_absence = false;
};

struct DeviationScore {
    NodeId member;
    std::map<std::string, double> per_platform;
    double aggregate = 0.0;
};

struct DeviationResult {
    std::vector<DeviationScore> scores; // sorted by member
    std::size_t skipped_terms = 0;
};

/// Per platform, the sum over windows and measures of the relative absolute
/// deviation from the team mean; the aggregate averages over all platforms,
/// a member absent from a platform scoring 0 there.
inline DeviationResult deviation_scores(const std::vector<PlatformSeries>& platforms,
                                        const DeviationOptions& opts = {}) {
    if (platforms.empty())
        throw InvalidArgument("at least one platform series is required");
    std::set<NodeId> members;
    for (const auto& p : platforms)
        for (const auto& m : p.members())
            members.insert(m);
    DeviationResult result;
    for (const auto& member : members) {
        DeviationScore score{member, {}, 0.0};
        for (const auto& p : platforms) {
            double s = 0.0;
            auto it = p.values.find(member);
            if (it != p.values.end()) {
                for (const auto& [measure, series] : it->second) {
                    const auto& means = p.means.at(measure);
                    for (std::size_t t = 0; t < series.size(); ++t) {
                        if (!means[t])
                            continue; // empty window
                        std::optional<double> v = series[t];
                        if (!v && opts.strict_absence)
                            v = 0.0;
                        if (!v)
                            continue;
                        const double mean = *means[t];
                        if (std::abs(mean) < opts.epsilon) {
                            ++result.skipped_terms;
                            continue;
                        }
                        s += std::abs((*v - mean) / mean);
                    }
                }
            }
            score.per_platform[p.platform] = s;
            score.aggregate += s;
        }
        score.aggregate /= static_cast<double>(platforms.size());
        result.scores.push_back(std::move(score));
    }
    return result;
}

/// The top_n members by aggregate score, ties in lexicographic order.
inline std::vector<DeviationScore> rank_members(std::vector<DeviationScore> scores, std::size_t top_n = 5) {
    if (top_n < 1)
        throw InvalidArgument("top_n must be at least 1");
    std::sort(scores.begin(), scores.end(), [](const DeviationScore& a, const DeviationScore& b) {
        if (a.aggregate != b.aggregate)
            return a.aggregate > b.aggregate;
        return a.member < b.member;
    });
    if (scores.size() > top_n)
        scores.resize(top_n);
    return scores;
}

// ---------------------------------------------------------------------------
// Evidence

struct EvidenceThresholds {
    double end_share = 0.5;          // theta_end
    std::size_t min_windows = 4;     // W
    double role_share = 0.05;        // theta_role
    std::size_t max_performers = 3;  // code-red when at most this many members end paths
    double min_visitation = 0.02;    // order-2 breadth filter
};

/// Consecutive windows [first, last] (indices) meeting a condition.
struct WindowRun {
    std::size_t first = 0;
    std::size_t last = 0;
    Timestamp start = 0; // start of the first window
    Timestamp end = 0;   // end of the last window
    std::size_t length() const { return last - first + 1; }
};

struct EndDominance {
    std::string platform;
    std::vector<WindowRun> runs; // runs of at least min_windows
    bool flagged() const { return !runs.empty(); }
};

struct CodeRedWindow {
    std::string platform;
    std::size_t window = 0;
    Timestamp start = 0;
    std::vector<NodeId> performers;
};

struct Breadth {
    std::string platform;
    std::set<NodeId> in_partners;  // u with (u, member) above threshold
    std::set<NodeId> out_partners; // w with (member, w) above threshold
    std::size_t total() const { return in_partners.size() + out_partners.size(); }
};

struct SmellEvidence {
    NodeId member;
    std::map<std::string, Series> path_end;
    std::map<std::string, Series> betweenness;
    std::vector<EndDominance> end_dominance;
    std::vector<CodeRedWindow> sole_performer;
    std::vector<Breadth> breadth;

    bool end_dominant() const {
        return std::any_of(end_dominance.begin(), end_dominance.end(),
                           [](const EndDominance& e) { return e.flagged(); });
    }
};

/// Windows in which between 1 and max_performers members end at least
/// role_share of the paths.
inline std::vector<CodeRedWindow> code_red_windows(const PlatformSeries& p, const EvidenceThresholds& th = {}) {
    std::vector<CodeRedWindow> out;
    if (!p.means.count(Measure::path_end))
        return out;
    for (std::size_t t = 0; t < p.windows.size(); ++t) {
        if (!p.means.at(Measure::path_end)[t])
            continue;
        CodeRedWindow w{p.platform, t, p.windows[t].start, {}};
        for (const auto& [member, by_measure] : p.values) {
            const auto& v = by_measure.at(Measure::path_end)[t];
            if (v && *v >= th.role_share)
                w.performers.push_back(member);
        }
        if (!w.performers.empty() && w.performers.size() <= th.max_performers)
            out.push_back(std::move(w));
    }
    return out;
}

/// Order-2 interaction partners of `member` whose edge state reaches
/// min_visitation in at least one window.
inline Breadth interaction_breadth(const std::vector<WindowSlice>& windows, const NodeId& member, std::size_t K,
                                   double min_visitation, std::string platform = {}) {
    Breadth b{std::move(platform), {}, {}};
    for (const auto& w : windows) {
        if (w.empty())
            continue;
        const auto model = fit_mogen(w.paths, std::max<std::size_t>(K, 2));
        const auto report = edge_centralities(model, {}, min_visitation);
        for (const auto& e : report.to(member))
            b.in_partners.insert(e.source);
        for (const auto& e : report.from(member))
            b.out_partners.insert(e.target);
    }
    return b;
}

/// Evidence series and flags for one member across platforms. Breadth
/// summaries are computed separately (they need the window datasets) and
/// may be attached by the caller.
inline SmellEvidence evidence(const std::vector<PlatformSeries>& platforms, const NodeId& member,
                              const EvidenceThresholds& th = {}) {
    const bool known = std::any_of(platforms.begin(), platforms.end(),
                                   [&](const PlatformSeries& p) { return p.values.count(member) > 0; });
    if (!known)
        throw InvalidArgument("unknown member '" + member + "'");
    SmellEvidence ev;
    ev.member = member;
    for (const auto& p : platforms) {
        auto it = p.values.find(member);
        if (it == p.values.end())
            continue;
        if (auto s = it->second.find(Measure::betweenness); s != it->second.end())
            ev.betweenness[p.platform] = s->second;
        auto s = it->second.find(Measure::path_end);
        if (s == it->second.end())
            continue;
        const auto& series = s->second;
        ev.path_end[p.platform] = series;

        EndDominance dom{p.platform, {}};
        std::optional<std::size_t> run_start;
        for (std::size_t t = 0; t <= series.size(); ++t) {
            const bool hit = t < series.size() && series[t] && *series[t] >= th.end_share;
            if (hit && !run_start)
                run_start = t;
            if (!hit && run_start) {
                WindowRun run{*run_start, t - 1, p.windows[*run_start].start, p.windows[t - 1].end()};
                if (run.length() >= th.min_windows)
                    dom.runs.push_back(run);
                run_start.reset();
            }
        }
        ev.end_dominance.push_back(std::move(dom));

        for (auto& w : code_red_windows(p, th))
            if (std::find(w.performers.begin(), w.performers.end(), member) != w.performers.end())
                ev.sole_performer.push_back(std::move(w));
    }
    return ev;
}

} // namespace mogen
