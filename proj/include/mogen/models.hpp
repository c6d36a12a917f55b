#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "json.hpp"
#include "mogen/error.hpp"
#include "mogen/pathdata.hpp"

namespace mogen {

using NodeIndex = std::uint32_t;
/// Interned higher-order state: 1..K node indices, oldest first.
using StateKey = std::vector<NodeIndex>;

/// Sorted node labels with reverse lookup.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<NodeId> sorted_labels) : labels_(std::move(sorted_labels)) {
        index_.reserve(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i)
            index_.emplace(labels_[i], static_cast<NodeIndex>(i));
    }

    std::size_t size() const { return labels_.size(); }
    const NodeId& label(NodeIndex i) const { return labels_[i]; }
    const std::vector<NodeId>& labels() const { return labels_; }

    std::optional<NodeIndex> find(const NodeId& label) const {
        auto it = index_.find(label);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    NodeIndex at(const NodeId& label) const {
        auto i = find(label);
        if (!i)
            throw InvalidArgument("unknown node '" + label + "'");
        return *i;
    }

    StateKey intern(std::span<const NodeId> nodes) const {
        StateKey key;
        key.reserve(nodes.size());
        for (const auto& v : nodes)
            key.push_back(at(v));
        return key;
    }

    std::vector<NodeId> labels_of(const StateKey& key) const {
        std::vector<NodeId> out;
        out.reserve(key.size());
        for (auto i : key)
            out.push_back(labels_[i]);
        return out;
    }

    /// State label with nodes joined by '|'.
    std::string join(const StateKey& key) const {
        std::string out;
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (i)
                out += '|';
            out += labels_[key[i]];
        }
        return out;
    }

private:
    std::vector<NodeId> labels_;
    std::unordered_map<NodeId, NodeIndex> index_;
};

/// A state of the multi-order chain: the initial marker, the terminal
/// marker, or a tuple of up to K consecutive nodes.
struct HigherOrderState {
    enum class Kind { start, nodes, end };

    Kind kind = Kind::nodes;
    std::vector<NodeId> nodes;

    static HigherOrderState start() { return {Kind::start, {}}; }
    static HigherOrderState end() { return {Kind::end, {}}; }
    static HigherOrderState of(std::vector<NodeId> nodes) { return {Kind::nodes, std::move(nodes)}; }

    std::string label() const {
        switch (kind) {
        case Kind::start:
            return std::string(kStartMarker);
        case Kind::end:
            return std::string(kEndMarker);
        case Kind::nodes:
            break;
        }
        std::string out;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (i)
                out += '|';
            out += nodes[i];
        }
        return out;
    }

    friend bool operator==(const HigherOrderState&, const HigherOrderState&) = default;
};

/// Tuples visited by a path under maximum order K (markers excluded): the
/// tuple at position j holds the last min(j+1, K) nodes up to j.
template <typename T>
std::vector<std::vector<T>> encode_tuples(std::span<const T> nodes, std::size_t K) {
    if (K < 1)
        throw InvalidArgument("maximum order K must be at least 1");
    std::vector<std::vector<T>> out;
    out.reserve(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const std::size_t first = j + 1 > K ? j + 1 - K : 0;
        out.emplace_back(nodes.begin() + static_cast<std::ptrdiff_t>(first),
                         nodes.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    }
    return out;
}

/// Full state sequence START, tuples..., END of a path.
inline std::vector<HigherOrderState> encode_path(const Path& p, std::size_t K) {
    if (K < 1)
        throw InvalidArgument("maximum order K must be at least 1");
    if (p.nodes.empty())
        throw InvalidArgument("cannot encode an empty path");
    std::vector<HigherOrderState> out;
    out.reserve(p.nodes.size() + 2);
    out.push_back(HigherOrderState::start());
    for (auto& t : encode_tuples<NodeId>(p.nodes, K))
        out.push_back(HigherOrderState::of(std::move(t)));
    out.push_back(HigherOrderState::end());
    return out;
}

// ---------------------------------------------------------------------------
// Network model

/// Weighted directed graph of all first-order transitions.
class NetworkModel {
public:
    const Vocabulary& vocabulary() const { return vocab_; }
    std::size_t node_count() const { return vocab_.size(); }

    /// Out-neighbours of `v` with transition counts, sorted by target.
    const std::map<NodeIndex, std::uint64_t>& successors(NodeIndex v) const { return adjacency_[v]; }

    std::uint64_t weight(NodeIndex from, NodeIndex to) const {
        const auto& row = adjacency_[from];
        auto it = row.find(to);
        return it == row.end() ? 0 : it->second;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& row : adjacency_)
            n += row.size();
        return n;
    }

    /// Adds (or increments) an edge; used to build topologies directly.
    void add_edge(NodeIndex from, NodeIndex to, std::uint64_t count = 1) { adjacency_[from][to] += count; }

    static NetworkModel with_vocabulary(Vocabulary vocab) {
        NetworkModel m;
        m.adjacency_.resize(vocab.size());
        m.vocab_ = std::move(vocab);
        return m;
    }

private:
    Vocabulary vocab_;
    std::vector<std::map<NodeIndex, std::uint64_t>> adjacency_;
};

inline NetworkModel fit_network(const PathDataset& ds) {
    require_nonempty(ds);
    auto m = NetworkModel::with_vocabulary(Vocabulary(ds.vocabulary()));
    const auto& vocab = m.vocabulary();
    for (const auto& p : ds.paths())
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            m.add_edge(vocab.at(p.nodes[i]), vocab.at(p.nodes[i + 1]), p.count);
    return m;
}

// ---------------------------------------------------------------------------
// Path model

/// The training paths themselves, interned, with a per-node occurrence index.
class PathModel {
public:
    struct IndexedPath {
        std::vector<NodeIndex> nodes;
        std::uint64_t count;
    };
    struct Occurrence {
        std::uint32_t path;
        std::uint32_t position;
    };

    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<IndexedPath>& paths() const { return paths_; }
    std::uint64_t total_count() const { return total_; }
    std::size_t max_length() const { return max_length_; }
    /// Every (path, position) at which node `v` occurs.
    const std::vector<Occurrence>& occurrences(NodeIndex v) const { return occurrences_[v]; }

    static PathModel fit(const PathDataset& ds) {
        require_nonempty(ds);
        PathModel m;
        m.vocab_ = Vocabulary(ds.vocabulary());
        m.occurrences_.resize(m.vocab_.size());
        // merge records that differ only by start time
        std::map<std::vector<NodeIndex>, std::uint64_t> merged;
        for (const auto& p : ds.paths())
            merged[m.vocab_.intern(p.nodes)] += p.count;
        for (auto& [nodes, count] : merged) {
            const auto idx = static_cast<std::uint32_t>(m.paths_.size());
            for (std::size_t j = 0; j < nodes.size(); ++j)
                m.occurrences_[nodes[j]].push_back({idx, static_cast<std::uint32_t>(j)});
            m.total_ += count;
            m.max_length_ = std::max(m.max_length_, nodes.size());
            m.paths_.push_back(IndexedPath{nodes, count});
        }
        return m;
    }

private:
    Vocabulary vocab_;
    std::vector<IndexedPath> paths_;
    std::vector<std::vector<Occurrence>> occurrences_;
    std::uint64_t total_ = 0;
    std::size_t max_length_ = 0;
};

inline PathModel fit_path_model(const PathDataset& ds) { return PathModel::fit(ds); }

// ---------------------------------------------------------------------------
// MOGen multi-order model

/// Absorbing multi-order Markov chain. Transient states are the observed
/// tuples; START enters through S, END is reached through R.
class MOGenModel {
public:
    using Row = std::vector<std::pair<std::size_t, double>>;

    std::size_t order() const { return K_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    /// Number of transient states m.
    std::size_t state_count() const { return states_.size(); }
    const StateKey& state(std::size_t i) const { return states_[i]; }
    const std::vector<StateKey>& states() const { return states_; }
    std::string state_label(std::size_t i) const { return vocab_.join(states_[i]); }
    NodeIndex last_node(std::size_t i) const { return states_[i].back(); }

    std::optional<std::size_t> find(const StateKey& key) const {
        auto it = index_.find(key);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    /// Starting distribution S over transient states.
    const std::vector<double>& start() const { return start_; }
    /// Probability R of moving from each transient state to END.
    const std::vector<double>& end() const { return end_; }
    /// Sparse rows of Q, sorted by column.
    const std::vector<Row>& transitions() const { return rows_; }

    double transition(std::size_t from, std::size_t to) const {
        for (const auto& [j, p] : rows_[from])
            if (j == to)
                return p;
        return 0.0;
    }

    /// Number of training path instances the model was fitted on.
    double path_count() const { return path_count_; }

    /// Log-likelihood of `ds` (multiplicity weighted); -inf when a path uses
    /// a transition the model has never seen.
    double log_likelihood(const PathDataset& ds) const {
        double ll = 0.0;
        for (const auto& p : ds.paths()) {
            double lp = 0.0;
            std::optional<std::size_t> prev;
            for (const auto& tuple : encode_tuples<NodeId>(p.nodes, K_)) {
                StateKey key;
                for (const auto& v : tuple) {
                    auto i = vocab_.find(v);
                    if (!i)
                        return -std::numeric_limits<double>::infinity();
                    key.push_back(*i);
                }
                auto s = find(key);
                if (!s)
                    return -std::numeric_limits<double>::infinity();
                const double prob = prev ? transition(*prev, *s) : start_[*s];
                if (prob <= 0.0)
                    return -std::numeric_limits<double>::infinity();
                lp += std::log(prob);
                prev = s;
            }
            if (end_[*prev] <= 0.0)
                return -std::numeric_limits<double>::infinity();
            lp += std::log(end_[*prev]);
            ll += lp * static_cast<double>(p.count);
        }
        return ll;
    }

    /// Free transition probabilities: nonzero entries minus one per row,
    /// over the START row and every transient row.
    std::size_t degrees_of_freedom() const {
        std::size_t nnz = 0;
        for (double s : start_)
            nnz += s > 0.0;
        std::size_t dof = nnz > 0 ? nnz - 1 : 0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const std::size_t row_nnz = rows_[i].size() + (end_[i] > 0.0);
            dof += row_nnz > 0 ? row_nnz - 1 : 0;
        }
        return dof;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["K"] = K_;
        j["paths"] = path_count_;
        j["vocabulary"] = vocab_.labels();
        auto& states = j["states"] = nlohmann::json::array();
        for (const auto& s : states_)
            states.push_back(vocab_.labels_of(s));
        j["S"] = start_;
        j["R"] = end_;
        auto& T = j["T"] = nlohmann::json::array();
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (const auto& [col, p] : rows_[i])
                T.push_back(nlohmann::json::array({i, col, p}));
        return j;
    }

    static MOGenModel from_json(const nlohmann::json& j) {
        MOGenModel m;
        try {
            m.K_ = j.at("K").get<std::size_t>();
            m.path_count_ = j.at("paths").get<double>();
            m.vocab_ = Vocabulary(j.at("vocabulary").get<std::vector<NodeId>>());
            for (const auto& s : j.at("states")) {
                auto labels = s.get<std::vector<NodeId>>();
                m.index_.emplace(m.vocab_.intern(labels), m.states_.size());
                m.states_.push_back(m.vocab_.intern(labels));
            }
            m.start_ = j.at("S").get<std::vector<double>>();
            m.end_ = j.at("R").get<std::vector<double>>();
            m.rows_.assign(m.states_.size(), {});
            for (const auto& t : j.at("T"))
                m.rows_.at(t.at(0).get<std::size_t>())
                    .emplace_back(t.at(1).get<std::size_t>(), t.at(2).get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed model document: ") + e.what());
        }
        if (m.start_.size() != m.states_.size() || m.end_.size() != m.states_.size())
            throw DataError("malformed model document: S/R length mismatch");
        return m;
    }

    friend MOGenModel fit_mogen(const PathDataset& ds, std::size_t K);

private:
    std::size_t K_ = 1;
    Vocabulary vocab_;
    std::vector<StateKey> states_;
    std::map<StateKey, std::size_t> index_;
    std::vector<double> start_;
    std::vector<double> end_;
    std::vector<Row> rows_;
    double path_count_ = 0.0;
};

/// Counts the encoded transitions of every path (weighted by multiplicity)
/// and row-normalises them. Only observed states are materialised.
inline MOGenModel fit_mogen(const PathDataset& ds, std::size_t K) {
    if (K < 1)
        throw InvalidArgument("maximum order K must be at least 1");
    require_nonempty(ds);
    MOGenModel m;
    m.K_ = K;
    m.vocab_ = Vocabulary(ds.vocabulary());

    std::vector<std::vector<StateKey>> encoded;
    encoded.reserve(ds.paths().size());
    for (const auto& p : ds.paths()) {
        encoded.push_back(encode_tuples<NodeIndex>(m.vocab_.intern(p.nodes), K));
        for (const auto& s : encoded.back())
            m.index_.emplace(s, 0);
    }
    m.states_.reserve(m.index_.size());
    for (auto& [key, idx] : m.index_) {
        idx = m.states_.size();
        m.states_.push_back(key);
    }

    const std::size_t n = m.states_.size();
    std::vector<double> start_counts(n, 0.0);
    std::vector<double> end_counts(n, 0.0);
    std::vector<std::map<std::size_t, double>> counts(n);
    for (std::size_t k = 0; k < encoded.size(); ++k) {
        const auto c = static_cast<double>(ds.paths()[k].count);
        const auto& seq = encoded[k];
        std::size_t prev = m.index_.at(seq.front());
        start_counts[prev] += c;
        for (std::size_t j = 1; j < seq.size(); ++j) {
            const std::size_t cur = m.index_.at(seq[j]);
            counts[prev][cur] += c;
            prev = cur;
        }
        end_counts[prev] += c;
    }

    const auto total = static_cast<double>(ds.total_count());
    m.path_count_ = total;
    m.start_.resize(n);
    m.end_.resize(n);
    m.rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.start_[i] = start_counts[i] / total;
        double row_total = end_counts[i];
        for (const auto& [j, c] : counts[i])
            row_total += c;
        m.end_[i] = end_counts[i] / row_total;
        m.rows_[i].reserve(counts[i].size());
        for (const auto& [j, c] : counts[i])
            m.rows_[i].emplace_back(j, c / row_total);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Fundamental matrix

struct FundamentalOptions {
    /// Largest state count for which dense() may materialise F.
    std::size_t dense_limit = 4000;
};

/// F = (I - Q)^-1 of an absorbing MOGen chain, held as sparse LU
/// factorisations of (I - Q) and its transpose. F is never inverted
/// explicitly; quantities derived from it come from linear solves.
class FundamentalMatrix {
public:
    using SparseMatrix = Eigen::SparseMatrix<double>;

    explicit FundamentalMatrix(const MOGenModel& model, FundamentalOptions opts = {})
        : size_(model.state_count()), opts_(opts) {
        std::vector<Eigen::Triplet<double>> triplets;
        for (std::size_t i = 0; i < size_; ++i) {
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
            for (const auto& [j, p] : model.transitions()[i])
                triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), -p);
        }
        SparseMatrix a(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(size_));
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        SparseMatrix at = a.transpose();
        at.makeCompressed();

        lu_ = std::make_shared<Solver>();
        lu_t_ = std::make_shared<Solver>();
        if (size_ > 0) {
            factorize(*lu_, a);
            factorize(*lu_t_, at);
        }

        Eigen::VectorXd s(static_cast<Eigen::Index>(size_));
        for (std::size_t i = 0; i < size_; ++i)
            s[static_cast<Eigen::Index>(i)] = model.start()[i];
        start_visits_ = to_std(solve_checked(*lu_t_, s));
        row_sums_ = to_std(solve_checked(*lu_, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(size_))));
    }

    std::size_t size() const { return size_; }

    /// (S·F)_j: expected visits to state j on a path drawn from START.
    const std::vector<double>& start_visits() const { return start_visits_; }

    /// (F·1)_i: expected visits to transient states from i before absorption,
    /// i itself included.
    const std::vector<double>& row_sums() const { return row_sums_; }

    /// Column j of F.
    std::vector<double> column(std::size_t j) const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
        e[static_cast<Eigen::Index>(j)] = 1.0;
        return to_std(solve_checked(*lu_, e));
    }

    /// Materialises F column by column. Refuses beyond `dense_limit` states.
    Eigen::MatrixXd dense() const {
        if (size_ > opts_.dense_limit)
            throw InvalidArgument("state count " + std::to_string(size_) +
                                  " exceeds the dense fundamental matrix limit");
        const auto n = static_cast<Eigen::Index>(size_);
        if (n == 0)
            return Eigen::MatrixXd(0, 0);
        Eigen::MatrixXd F = lu_->solve(Eigen::MatrixXd::Identity(n, n));
        if (lu_->info() != Eigen::Success || !F.allFinite())
            throw NumericError("non-absorbing chain: solve failed");
        return F;
    }

private:
    using Solver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

    static void factorize(Solver& solver, const SparseMatrix& m) {
        solver.analyzePattern(m);
        solver.factorize(m);
        if (solver.info() != Eigen::Success)
            throw NumericError("non-absorbing chain: I - Q is singular");
    }

    Eigen::VectorXd solve_checked(const Solver& solver, const Eigen::VectorXd& rhs) const {
        if (size_ == 0)
            return Eigen::VectorXd(0);
        Eigen::VectorXd x = solver.solve(rhs);
        if (solver.info() != Eigen::Success || !x.allFinite())
            throw NumericError("non-absorbing chain: solve failed");
        return x;
    }

    static std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

    std::size_t size_;
    FundamentalOptions opts_;
    std::shared_ptr<Solver> lu_;
    std::shared_ptr<Solver> lu_t_;
    std::vector<double> start_visits_;
    std::vector<double> row_sums_;
};

inline FundamentalMatrix fundamental_matrix(const MOGenModel& m, FundamentalOptions opts = {}) {
    return FundamentalMatrix(m, opts);
}

// ---------------------------------------------------------------------------
// Order selection

struct OrderScore {
    std::size_t K;
    double log_likelihood;
    std::size_t dof;
    double aic;
};

/// AIC = 2·dof - 2·logL of the training data for every K in 1..K_max.
inline std::vector<OrderScore> order_scores(const PathDataset& ds, std::size_t K_max) {
    if (K_max < 1)
        throw InvalidArgument("K_max must be at least 1");
    require_nonempty(ds);
    std::vector<OrderScore> out;
    for (std::size_t K = 1; K <= K_max; ++K) {
        const auto m = fit_mogen(ds, K);
        const double ll = m.log_likelihood(ds);
        const auto dof = m.degrees_of_freedom();
        out.push_back({K, ll, dof, 2.0 * static_cast<double>(dof) - 2.0 * ll});
    }
    return out;
}

/// K in 1..K_max with minimal AIC; the smaller order wins ties.
inline std::size_t select_order(const PathDataset& ds, std::size_t K_max) {
    const auto scores = order_scores(ds, K_max);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i].aic < scores[best].aic)
            best = i;
    return scores[best].K;
}

} // namespace mogen
