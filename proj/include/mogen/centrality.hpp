#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mogen/error.hpp"
#include "mogen/models.hpp"

namespace mogen {

enum class Measure { betweenness, closeness, path_end, path_continuation, path_reach, visitation };

inline constexpr std::array<Measure, 6> kAllMeasures = {Measure::betweenness,      Measure::closeness,
                                                        Measure::path_end,         Measure::path_continuation,
                                                        Measure::path_reach,       Measure::visitation};

inline std::string_view to_string(Measure m) {
    switch (m) {
    case Measure::betweenness:
        return "betweenness";
    case Measure::closeness:
        return "closeness";
    case Measure::path_end:
        return "path_end";
    case Measure::path_continuation:
        return "path_continuation";
    case Measure::path_reach:
        return "path_reach";
    case Measure::visitation:
        return "visitation";
    }
    return "?";
}

inline Measure parse_measure(std::string_view name) {
    for (auto m : kAllMeasures)
        if (to_string(m) == name)
            return m;
    throw InvalidArgument("unknown measure '" + std::string(name) + "'");
}

enum class ModelKind { network, path, mogen };

inline std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::network:
        return "network";
    case ModelKind::path:
        return "path";
    case ModelKind::mogen:
        return "mogen";
    }
    return "?";
}

/// True when the measure needs path start/end information.
inline bool needs_path_ends(Measure m) {
    return m == Measure::path_end || m == Measure::path_continuation || m == Measure::path_reach ||
           m == Measure::visitation;
}

/// Sum of 1/D over targets (formula as written) or over sources.
enum class ClosenessDirection { outgoing, incoming };

struct CentralityOptions {
    /// Subtract the per-state termination probability R_v instead of the
    /// expected number of terminations at v.
    bool raw_betweenness = false;
    ClosenessDirection direction = ClosenessDirection::outgoing;
};

/// Scores keyed by node tuple; first-order vectors use 1-tuples.
struct CentralityVector {
    Measure measure = Measure::betweenness;
    ModelKind model = ModelKind::network;
    std::map<std::vector<NodeId>, double> scores;

    double at(const NodeId& v) const { return at(std::vector<NodeId>{v}); }
    double at(const std::vector<NodeId>& state) const {
        auto it = scores.find(state);
        if (it == scores.end())
            throw InvalidArgument("no score for state");
        return it->second;
    }
    double get(const NodeId& v, double fallback = 0.0) const {
        auto it = scores.find({v});
        return it == scores.end() ? fallback : it->second;
    }
};

namespace detail {

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

inline double harmonic(std::uint32_t d) { return d == kUnreachable || d == 0 ? 0.0 : 1.0 / d; }

} // namespace detail

// ---------------------------------------------------------------------------
// Network model

/// Directed unweighted betweenness over ordered pairs (s,t), s != t, with
/// endpoints excluded (Brandes accumulation).
inline CentralityVector betweenness(const NetworkModel& net) {
    const std::size_t n = net.node_count();
    std::vector<double> bc(n, 0.0);
    std::vector<std::vector<NodeIndex>> preds(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::int64_t> dist(n);
    std::vector<NodeIndex> stack;
    for (NodeIndex s = 0; s < n; ++s) {
        for (auto& p : preds)
            p.clear();
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        stack.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<NodeIndex> queue{s};
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            stack.push_back(v);
            for (const auto& [w, weight] : net.successors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const auto w = *it;
            for (auto v : preds[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s)
                bc[w] += delta[w];
        }
    }
    CentralityVector out{Measure::betweenness, ModelKind::network, {}};
    for (NodeIndex v = 0; v < n; ++v)
        out.scores[{net.vocabulary().label(v)}] = bc[v];
    return out;
}

/// Shortest hop distances from every node (BFS), kUnreachable if none.
inline std::vector<std::vector<std::uint32_t>> distance_matrix(const NetworkModel& net) {
    const std::size_t n = net.node_count();
    std::vector<std::vector<std::uint32_t>> dist(n, std::vector<std::uint32_t>(n, detail::kUnreachable));
    for (NodeIndex s = 0; s < n; ++s) {
        auto& d = dist[s];
        d[s] = 0;
        std::deque<NodeIndex> queue{s};
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            for (const auto& [w, weight] : net.successors(v))
                if (d[w] == detail::kUnreachable) {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
        }
    }
    return dist;
}

/// Harmonic closeness; unreachable pairs contribute 0.
inline CentralityVector closeness(const NetworkModel& net, ClosenessDirection dir = ClosenessDirection::outgoing) {
    const auto dist = distance_matrix(net);
    const std::size_t n = net.node_count();
    CentralityVector out{Measure::closeness, ModelKind::network, {}};
    for (NodeIndex v = 0; v < n; ++v) {
        double c = 0.0;
        for (NodeIndex i = 0; i < n; ++i)
            if (i != v)
                c += detail::harmonic(dir == ClosenessDirection::outgoing ? dist[v][i] : dist[i][v]);
        out.scores[{net.vocabulary().label(v)}] = c;
    }
    return out;
}

inline CentralityVector centrality(const NetworkModel& net, Measure m, const CentralityOptions& opts = {}) {
    switch (m) {
    case Measure::betweenness:
        return betweenness(net);
    case Measure::closeness:
        return closeness(net, opts.direction);
    default:
        throw UnsupportedMeasure(std::string(to_string(m)) + " cannot be computed for a network model");
    }
}

// ---------------------------------------------------------------------------
// Path model

/// Path-model measures over every node sequence of length 1..max_order
/// that occurs contiguously in the paths. A sequence "occurs at j" when it
/// ends at position j.
class PathCentrality {
public:
    // keeps a reference to the model
    PathCentrality(PathModel&&, std::size_t = 1, ClosenessDirection = ClosenessDirection::outgoing) = delete;
    explicit PathCentrality(const PathModel& model, std::size_t max_order = 1,
                            ClosenessDirection dir = ClosenessDirection::outgoing)
        : model_(model), max_order_(std::max<std::size_t>(1, max_order)), direction_(dir) {
        for (const auto& p : model.paths()) {
            const auto c = static_cast<double>(p.count);
            const std::size_t l = p.nodes.size();
            total_occurrences_ += c * static_cast<double>(l);
            for (std::size_t j = 0; j < l; ++j) {
                for (std::size_t k = 1; k <= max_order_ && k <= j + 1; ++k) {
                    auto& s = stats_[StateKey(p.nodes.begin() + static_cast<std::ptrdiff_t>(j + 1 - k),
                                              p.nodes.begin() + static_cast<std::ptrdiff_t>(j + 1))];
                    s.occurrences += c;
                    s.remaining += c * static_cast<double>(l - 1 - j);
                    if (j + 1 == l) {
                        s.terminal += c;
                    } else if (j != 0) {
                        s.interior += c;
                    }
                }
            }
        }
    }

    /// Scores over all sequences up to max_order.
    CentralityVector states(Measure m) const { return build(m, max_order_); }

    /// Scores over first-order nodes only.
    CentralityVector nodes(Measure m) const { return build(m, 1); }

private:
    struct Counts {
        double occurrences = 0.0;
        double interior = 0.0;
        double terminal = 0.0;
        double remaining = 0.0;
    };

    CentralityVector build(Measure m, std::size_t order) const {
        CentralityVector out{m, ModelKind::path, {}};
        const auto& vocab = model_.vocabulary();
        const auto N = static_cast<double>(model_.total_count());
        std::map<StateKey, std::map<NodeIndex, std::uint32_t>> dist;
        if (m == Measure::closeness)
            dist = distances(order);
        for (const auto& [key, s] : stats_) {
            if (key.size() > order)
                continue;
            double v = 0.0;
            switch (m) {
            case Measure::betweenness:
                v = s.interior;
                break;
            case Measure::path_end:
                v = s.terminal / N;
                break;
            case Measure::path_continuation:
                v = 1.0 - s.terminal / s.occurrences;
                break;
            case Measure::path_reach:
                v = s.remaining / s.occurrences;
                break;
            case Measure::visitation:
                v = s.occurrences / total_occurrences_;
                break;
            case Measure::closeness:
                if (auto it = dist.find(key); it != dist.end())
                    for (const auto& [w, d] : it->second)
                        if (w != key.back())
                            v += detail::harmonic(d);
                break;
            }
            out.scores[vocab.labels_of(key)] = v;
        }
        return out;
    }

    /// Shortest observed sub-path distance between each sequence and each
    /// first-order node (after it for outgoing, before it for incoming).
    std::map<StateKey, std::map<NodeIndex, std::uint32_t>> distances(std::size_t order) const {
        std::map<StateKey, std::map<NodeIndex, std::uint32_t>> dist;
        for (const auto& p : model_.paths()) {
            const std::size_t l = p.nodes.size();
            for (std::size_t j = 0; j < l; ++j) {
                for (std::size_t k = 1; k <= order && k <= j + 1; ++k) {
                    auto& row = dist[StateKey(p.nodes.begin() + static_cast<std::ptrdiff_t>(j + 1 - k),
                                              p.nodes.begin() + static_cast<std::ptrdiff_t>(j + 1))];
                    if (direction_ == ClosenessDirection::outgoing) {
                        for (std::size_t t = j + 1; t < l; ++t)
                            relax(row, p.nodes[t], static_cast<std::uint32_t>(t - j));
                    } else {
                        for (std::size_t t = 0; t < j; ++t)
                            relax(row, p.nodes[t], static_cast<std::uint32_t>(j - t));
                    }
                }
            }
        }
        return dist;
    }

    static void relax(std::map<NodeIndex, std::uint32_t>& row, NodeIndex w, std::uint32_t d) {
        auto [it, inserted] = row.emplace(w, d);
        if (!inserted && d < it->second)
            it->second = d;
    }

    const PathModel& model_;
    std::size_t max_order_;
    ClosenessDirection direction_;
    std::map<StateKey, Counts> stats_;
    double total_occurrences_ = 0.0;
};

inline CentralityVector centrality(const PathModel& model, Measure m, const CentralityOptions& opts = {}) {
    return PathCentrality(model, 1, opts.direction).nodes(m);
}

// ---------------------------------------------------------------------------
// MOGen model

/// Analytic MOGen centralities from the fundamental matrix. State-level
/// scores are per transient state; first-order scores aggregate the states
/// ending in each node.
class MOGenCentrality {
public:
    // keeps a reference to the model
    MOGenCentrality(MOGenModel&&, CentralityOptions = {}) = delete;
    explicit MOGenCentrality(const MOGenModel& model, CentralityOptions opts = {})
        : model_(model), opts_(opts), fundamental_(model) {
        const auto& visits = fundamental_.start_visits();
        visit_total_ = 0.0;
        for (double v : visits)
            visit_total_ += v;
    }

    const FundamentalMatrix& fundamental() const { return fundamental_; }

    /// Expected visits per path, (S·F).
    const std::vector<double>& visits() const { return fundamental_.start_visits(); }

    /// Per-state value of a measure, indexed like model.states().
    std::vector<double> state_values(Measure m) const {
        const std::size_t n = model_.state_count();
        const auto& S = model_.start();
        const auto& R = model_.end();
        const auto& V = visits();
        const auto& rows = fundamental_.row_sums();
        const double N = model_.path_count();
        std::vector<double> out(n, 0.0);
        switch (m) {
        case Measure::betweenness:
            // expected interior visits, scaled to the training path count.
            // A single-node path both starts and ends at its one visit; S·R adds
            // that visit back so it is not subtracted twice.
            for (std::size_t i = 0; i < n; ++i) {
                const double ends = opts_.raw_betweenness ? R[i] : V[i] * R[i] - S[i] * R[i];
                out[i] = N * (V[i] - S[i] - ends);
            }
            break;
        case Measure::path_end:
            for (std::size_t i = 0; i < n; ++i)
                out[i] = V[i] * R[i];
            break;
        case Measure::path_continuation:
            for (std::size_t i = 0; i < n; ++i)
                out[i] = 1.0 - R[i];
            break;
        case Measure::path_reach:
            for (std::size_t i = 0; i < n; ++i)
                out[i] = rows[i] - 1.0;
            break;
        case Measure::visitation:
            for (std::size_t i = 0; i < n; ++i)
                out[i] = visit_total_ > 0.0 ? V[i] / visit_total_ : 0.0;
            break;
        case Measure::closeness: {
            const auto d = state_to_node_distances();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t w = 0; w < d[i].size(); ++w)
                    if (w != model_.last_node(i))
                        out[i] += detail::harmonic(d[i][w]);
            break;
        }
        }
        return out;
    }

    CentralityVector states(Measure m) const {
        const auto values = state_values(m);
        CentralityVector out{m, ModelKind::mogen, {}};
        for (std::size_t i = 0; i < values.size(); ++i)
            out.scores[model_.vocabulary().labels_of(model_.state(i))] = values[i];
        return out;
    }

    /// First-order projection.
    CentralityVector nodes(Measure m) const { return suffixes(m, 1); }

    /// Projection onto every node tuple of length <= max_len that is a
    /// suffix of some state. Betweenness, path end and visitation sum over
    /// the states carrying the suffix; continuation and reach average them
    /// weighted by expected visits; closeness takes the minimum distance.
    CentralityVector suffixes(Measure m, std::size_t max_len) const {
        const auto& vocab = model_.vocabulary();
        const auto& V = visits();
        const bool averaged = m == Measure::path_continuation || m == Measure::path_reach;
        struct Acc {
            double sum = 0.0;
            double weight = 0.0;
            std::vector<std::uint32_t> dist;
        };
        std::map<StateKey, Acc> acc;
        std::vector<double> values;
        std::vector<std::vector<std::uint32_t>> dist;
        if (m == Measure::closeness)
            dist = state_to_node_distances();
        else
            values = state_values(m);
        for (std::size_t i = 0; i < model_.state_count(); ++i) {
            const auto& key = model_.state(i);
            for (std::size_t k = 1; k <= max_len && k <= key.size(); ++k) {
                auto& a = acc[StateKey(key.end() - static_cast<std::ptrdiff_t>(k), key.end())];
                if (m == Measure::closeness) {
                    if (a.dist.empty())
                        a.dist = dist[i];
                    else
                        for (std::size_t w = 0; w < a.dist.size(); ++w)
                            a.dist[w] = std::min(a.dist[w], dist[i][w]);
                } else if (averaged) {
                    a.sum += V[i] * values[i];
                    a.weight += V[i];
                } else {
                    a.sum += values[i];
                }
            }
        }
        CentralityVector out{m, ModelKind::mogen, {}};
        for (const auto& [key, a] : acc) {
            double score = a.sum;
            if (m == Measure::closeness) {
                score = 0.0;
                for (std::size_t w = 0; w < a.dist.size(); ++w)
                    if (w != key.back())
                        score += detail::harmonic(a.dist[w]);
            } else if (averaged) {
                score = a.weight > 0.0 ? a.sum / a.weight : 0.0;
            }
            out.scores[vocab.labels_of(key)] = score;
        }
        return out;
    }

    /// Scores of arbitrary node sequences, including ones longer than K.
    /// The expected occurrences of u = (u1..uL) per path are obtained by
    /// starting from the expected visits of every state ending in u1 and
    /// following the transitions that emit u2..uL; the states reached are
    /// weighted like the states of a suffix projection. For sequences up to
    /// length K this equals suffixes(). Sequences the chain cannot produce
    /// score 0 under betweenness, path end and visitation and are left out
    /// for the other measures.
    CentralityVector sequences(Measure m, const std::vector<std::vector<NodeId>>& targets) const {
        const auto& vocab = model_.vocabulary();
        const auto& S = model_.start();
        const auto& R = model_.end();
        const auto& V = visits();
        const double N = model_.path_count();
        std::vector<std::vector<std::size_t>> by_last(vocab.size());
        for (std::size_t i = 0; i < model_.state_count(); ++i)
            by_last[model_.last_node(i)].push_back(i);
        std::vector<double> values;
        std::vector<std::vector<std::uint32_t>> dist;
        if (m == Measure::closeness)
            dist = state_to_node_distances();
        else
            values = state_values(m);
        const bool counted = m == Measure::betweenness || m == Measure::path_end || m == Measure::visitation;

        CentralityVector out{m, ModelKind::mogen, {}};
        std::map<std::size_t, double> frontier, next;
        for (const auto& target : targets) {
            if (target.empty())
                continue;
            frontier.clear();
            bool known = true;
            for (std::size_t k = 0; k < target.size() && known; ++k) {
                const auto v = vocab.find(target[k]);
                if (!v) {
                    known = false;
                    break;
                }
                if (k == 0) {
                    for (auto s : by_last[*v])
                        if (V[s] > 0.0)
                            frontier[s] = V[s];
                    continue;
                }
                next.clear();
                for (const auto& [s, w] : frontier)
                    for (const auto& [j, p] : model_.transitions()[s])
                        if (model_.last_node(j) == *v && p > 0.0)
                            next[j] += w * p;
                frontier.swap(next);
            }
            if (!known)
                frontier.clear();

            double score = 0.0;
            double weight = 0.0;
            for (const auto& [f, w] : frontier)
                weight += w;
            if (m == Measure::closeness) {
                if (frontier.empty())
                    continue;
                const auto last = frontier.begin()->first;
                for (std::size_t x = 0; x < vocab.size(); ++x) {
                    if (x == model_.last_node(last))
                        continue;
                    std::uint32_t d = detail::kUnreachable;
                    for (const auto& [f, w] : frontier)
                        d = std::min(d, dist[f][x]);
                    score += detail::harmonic(d);
                }
            } else if (!counted) {
                if (weight <= 0.0)
                    continue;
                for (const auto& [f, w] : frontier)
                    score += w * values[f];
                score /= weight;
            } else {
                for (const auto& [f, w] : frontier) {
                    switch (m) {
                    case Measure::betweenness: {
                        // only a single node can sit at the start of a path
                        const double starts = target.size() == 1 ? S[f] : 0.0;
                        const double ends = opts_.raw_betweenness ? R[f] : w * R[f] - starts * R[f];
                        score += N * (w - starts - ends);
                        break;
                    }
                    case Measure::path_end:
                        score += w * R[f];
                        break;
                    default:
                        score += visit_total_ > 0.0 ? w / visit_total_ : 0.0;
                    }
                }
            }
            out.scores[target] = score;
        }
        return out;
    }

    /// Hop distances from each state to the nearest state ending in each
    /// first-order node (towards it for incoming closeness).
    std::vector<std::vector<std::uint32_t>> state_to_node_distances() const {
        const std::size_t n = model_.state_count();
        const std::size_t nv = model_.vocabulary().size();
        std::vector<std::vector<std::uint32_t>> out(n, std::vector<std::uint32_t>(nv, detail::kUnreachable));
        const auto adj = adjacency(opts_.direction == ClosenessDirection::incoming);
        std::vector<std::uint32_t> d(n);
        for (std::size_t s = 0; s < n; ++s) {
            bfs(adj, s, d);
            for (std::size_t t = 0; t < n; ++t)
                if (t != s && d[t] != detail::kUnreachable) {
                    auto& slot = out[s][model_.last_node(t)];
                    slot = std::min(slot, d[t]);
                }
        }
        return out;
    }

    /// First-order distance matrix constrained by the multi-order topology:
    /// row v holds, for each w, the minimum over states ending in v of the
    /// state-to-node distance. Outgoing: d(v -> w); incoming: d(w -> v).
    std::vector<std::vector<std::uint32_t>> node_distances() const {
        const std::size_t nv = model_.vocabulary().size();
        std::vector<std::vector<std::uint32_t>> out(nv, std::vector<std::uint32_t>(nv, detail::kUnreachable));
        const auto per_state = state_to_node_distances();
        for (std::size_t s = 0; s < per_state.size(); ++s) {
            auto& row = out[model_.last_node(s)];
            for (NodeIndex w = 0; w < nv; ++w)
                row[w] = std::min(row[w], per_state[s][w]);
        }
        return out;
    }

private:
    std::vector<std::vector<std::size_t>> adjacency(bool reversed) const {
        std::vector<std::vector<std::size_t>> adj(model_.state_count());
        for (std::size_t i = 0; i < adj.size(); ++i)
            for (const auto& [j, p] : model_.transitions()[i])
                if (p > 0.0)
                    (reversed ? adj[j] : adj[i]).push_back(reversed ? i : j);
        return adj;
    }

    static void bfs(const std::vector<std::vector<std::size_t>>& adj, std::size_t s, std::vector<std::uint32_t>& d) {
        std::fill(d.begin(), d.end(), detail::kUnreachable);
        d[s] = 0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            for (auto w : adj[v])
                if (d[w] == detail::kUnreachable) {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
        }
    }

    const MOGenModel& model_;
    CentralityOptions opts_;
    FundamentalMatrix fundamental_;
    double visit_total_ = 0.0;
};

inline CentralityVector centrality(const MOGenModel& model, Measure m, const CentralityOptions& opts = {}) {
    return MOGenCentrality(model, opts).nodes(m);
}

// Named entry points; each returns the first-order vector.

template <typename Model>
CentralityVector betweenness(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::betweenness, opts);
}
template <typename Model>
CentralityVector closeness(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::closeness, opts);
}
template <typename Model>
CentralityVector path_end(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::path_end, opts);
}
template <typename Model>
CentralityVector path_continuation(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::path_continuation, opts);
}
template <typename Model>
CentralityVector path_reach(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::path_reach, opts);
}
template <typename Model>
CentralityVector visitation(const Model& m, const CentralityOptions& opts = {}) {
    return centrality(m, Measure::visitation, opts);
}

// ---------------------------------------------------------------------------
// Edge (order-2 state) centralities

struct EdgeCentrality {
    NodeId source;
    NodeId target;
    /// Share of all expected state visits spent in (source, target).
    double visitation = 0.0;
    std::map<Measure, double> values;
};

struct EdgeReport {
    std::vector<EdgeCentrality> edges; // sorted by (source, target)

    std::vector<EdgeCentrality> from(const NodeId& v) const {
        std::vector<EdgeCentrality> out;
        for (const auto& e : edges)
            if (e.source == v)
                out.push_back(e);
        return out;
    }
    std::vector<EdgeCentrality> to(const NodeId& v) const {
        std::vector<EdgeCentrality> out;
        for (const auto& e : edges)
            if (e.target == v)
                out.push_back(e);
        return out;
    }
};

/// State-level centralities of the order-2 states of a MOGen model with
/// K >= 2, keeping states whose visitation share is at least min_visitation.
inline EdgeReport edge_centralities(const MOGenModel& model, const std::vector<Measure>& measures,
                                    double min_visitation = 0.02, const CentralityOptions& opts = {}) {
    if (model.order() < 2)
        throw InvalidArgument("edge centralities need a model with K >= 2");
    const MOGenCentrality mc(model, opts);
    const auto share = mc.state_values(Measure::visitation);
    std::map<Measure, std::vector<double>> values;
    for (auto m : measures)
        values[m] = mc.state_values(m);
    EdgeReport report;
    for (std::size_t i = 0; i < model.state_count(); ++i) {
        const auto& key = model.state(i);
        if (key.size() != 2 || share[i] < min_visitation)
            continue;
        EdgeCentrality e;
        e.source = model.vocabulary().label(key[0]);
        e.target = model.vocabulary().label(key[1]);
        e.visitation = share[i];
        for (const auto& [m, v] : values)
            e.values[m] = v[i];
        report.edges.push_back(std::move(e));
    }
    return report;
}

} // namespace mogen
