#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mogen/centrality.hpp"
#include "mogen/error.hpp"
#include "mogen/models.hpp"
#include "mogen/pathdata.hpp"
#include "mogen/rng.hpp"

namespace mogen {

struct SplitSpec {
    double train_fraction = 0.3;
    std::uint64_t seed = 0;
    std::size_t replicates = 5;
};

/// Assigns every path instance (multiplicities unrolled) to the training
/// set independently with probability train_fraction. Degenerate splits are
/// retried with the next sub-seed, up to 100 attempts.
inline std::pair<PathDataset, PathDataset> split(const PathDataset& ds, const SplitSpec& spec,
                                                 std::uint64_t replicate = 0) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw InvalidArgument("train fraction must lie in (0, 1)");
    if (ds.total_count() < 2)
        throw DataError("split needs at least two path instances");
    const SplitMix64 root = SplitMix64(spec.seed).split(replicate);
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        auto rng = root.split(attempt);
        std::vector<Path> train, test;
        for (const auto& p : ds.paths()) {
            std::uint64_t in_train = 0;
            for (std::uint64_t k = 0; k < p.count; ++k)
                in_train += rng.bernoulli(spec.train_fraction);
            if (in_train > 0)
                train.push_back(Path{p.nodes, in_train, p.start_time});
            if (in_train < p.count)
                test.push_back(Path{p.nodes, p.count - in_train, p.start_time});
        }
        if (!train.empty() && !test.empty())
            return {PathDataset(std::move(train)), PathDataset(std::move(test))};
    }
    throw DataError("could not produce a non-degenerate split in 100 attempts");
}

// ---------------------------------------------------------------------------
// Ground truth

using StateScores = std::map<std::vector<NodeId>, double>;

struct GroundTruth {
    Measure measure = Measure::betweenness;
    /// Descending by score; equal scores in lexicographic state order.
    std::vector<std::pair<std::vector<NodeId>, double>> ranking;
};

inline GroundTruth rank_scores(Measure m, const StateScores& scores) {
    GroundTruth gt{m, {scores.begin(), scores.end()}};
    // map iteration is already lexicographic, so a stable sort keeps ties ordered
    std::stable_sort(gt.ranking.begin(), gt.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return gt;
}

/// Path-model centralities of every node sequence up to K_truth occurring
/// in the test paths.
inline GroundTruth ground_truth(const PathDataset& test, Measure m, std::size_t K_truth,
                                ClosenessDirection dir = ClosenessDirection::outgoing) {
    if (K_truth < 1)
        throw InvalidArgument("K_truth must be at least 1");
    const auto model = PathModel::fit(test);
    return rank_scores(m, PathCentrality(model, K_truth, dir).states(m).scores);
}

// ---------------------------------------------------------------------------
// Upward projection

enum class UnmatchedTargets { minimum_score, exclude };

/// Gives every target the score of its longest suffix present in `scores`.
/// Targets without any scored suffix get the minimum score, or nullopt
/// under UnmatchedTargets::exclude.
inline std::vector<std::optional<double>> project_up(const StateScores& scores,
                                                     const std::vector<std::vector<NodeId>>& targets,
                                                     UnmatchedTargets fallback = UnmatchedTargets::minimum_score) {
    double lowest = 0.0;
    if (!scores.empty()) {
        lowest = scores.begin()->second;
        for (const auto& [k, v] : scores)
            lowest = std::min(lowest, v);
    }
    std::vector<std::optional<double>> out;
    out.reserve(targets.size());
    for (const auto& t : targets) {
        std::optional<double> score;
        for (std::size_t k = t.size(); k >= 1 && !score; --k) {
            auto it = scores.find(std::vector<NodeId>(t.end() - static_cast<std::ptrdiff_t>(k), t.end()));
            if (it != scores.end())
                score = it->second;
        }
        if (!score && fallback == UnmatchedTargets::minimum_score)
            score = lowest;
        out.push_back(score);
    }
    return out;
}

// ---------------------------------------------------------------------------
// AUC

/// Area under the ROC curve via the Mann-Whitney statistic with midranks
/// for tied scores. Requires at least one positive and one negative.
template <typename Labels, typename Scores>
double auc(const Labels& labels, const Scores& scores) {
    const auto n = static_cast<std::size_t>(std::size(labels));
    if (n != static_cast<std::size_t>(std::size(scores)))
        throw InvalidArgument("labels and scores differ in length");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    auto score_at = [&](std::size_t i) { return static_cast<double>(*(std::begin(scores) + i)); };
    auto label_at = [&](std::size_t i) { return static_cast<bool>(*(std::begin(labels) + i)); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score_at(a) < score_at(b); });
    double rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && score_at(order[j]) == score_at(order[i]))
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (label_at(order[k])) {
                rank_sum += midrank;
                ++positives;
            }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw InvalidArgument("AUC needs both positive and negative labels");
    const double p = static_cast<double>(positives);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

// ---------------------------------------------------------------------------
// Prediction experiment

struct ModelConfig {
    ModelKind kind = ModelKind::network;
    std::size_t K = 1; // mogen only

    std::string label() const {
        switch (kind) {
        case ModelKind::network:
            return "N";
        case ModelKind::path:
            return "P";
        case ModelKind::mogen:
            return "M" + std::to_string(K);
        }
        return "?";
    }

    /// Parses "N", "P" or "M<K>".
    static ModelConfig parse(std::string_view s) {
        if (s == "N")
            return {ModelKind::network, 1};
        if (s == "P")
            return {ModelKind::path, 1};
        if (s.size() > 1 && s.front() == 'M') {
            auto k = detail::parse_int<std::size_t>(s.substr(1));
            if (k && *k >= 1)
                return {ModelKind::mogen, *k};
        }
        throw InvalidArgument("unknown model label '" + std::string(s) + "'");
    }
};

struct ExperimentOptions {
    /// Longest node sequence in the ground-truth target set.
    std::size_t K_truth = 5;
    /// Label the top decile within each sequence length instead of one pool.
    bool per_order_pooling = false;
    UnmatchedTargets unmatched = UnmatchedTargets::minimum_score;
    /// Score targets longer than K by following the chain's transitions
    /// instead of copying the score of their K-suffix.
    bool mogen_sequences = true;
    CentralityOptions centrality;
};

struct AUCResult {
    std::string model;
    Measure measure = Measure::betweenness;
    double mean = 0.0;
    std::vector<double> replicates;
};

inline constexpr double kTopFraction = 0.1;

/// Binary labels of a ground truth: the first ceil(0.1 n) ranked states.
inline std::vector<bool> top_decile_labels(const GroundTruth& gt, bool per_order = false) {
    const auto n = gt.ranking.size();
    std::vector<bool> labels(n, false);
    if (!per_order) {
        const auto positives = static_cast<std::size_t>(std::ceil(kTopFraction * static_cast<double>(n)));
        for (std::size_t i = 0; i < positives && i < n; ++i)
            labels[i] = true;
        return labels;
    }
    std::map<std::size_t, std::vector<std::size_t>> by_order;
    for (std::size_t i = 0; i < n; ++i)
        by_order[gt.ranking[i].first.size()].push_back(i);
    for (const auto& [order, idx] : by_order) {
        const auto positives = static_cast<std::size_t>(std::ceil(kTopFraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < positives; ++i)
            labels[idx[i]] = true;
    }
    return labels;
}

/// AUC of predicted scores against the top-decile labels of a ground truth.
inline double score_against(const GroundTruth& gt, const StateScores& predictions, const ExperimentOptions& opts) {
    if (gt.ranking.size() < 10)
        throw DataError("target set too small for decile labeling");
    std::vector<std::vector<NodeId>> targets;
    targets.reserve(gt.ranking.size());
    for (const auto& [state, score] : gt.ranking)
        targets.push_back(state);
    const auto projected = project_up(predictions, targets, opts.unmatched);
    const auto all_labels = top_decile_labels(gt, opts.per_order_pooling);
    std::vector<bool> labels;
    std::vector<double> scores;
    for (std::size_t i = 0; i < projected.size(); ++i)
        if (projected[i]) {
            labels.push_back(all_labels[i]);
            scores.push_back(*projected[i]);
        }
    return auc(labels, scores);
}

namespace detail {

/// Predicted scores of one fitted model for every measure it supports.
inline std::map<Measure, StateScores> predict(const ModelConfig& cfg, const PathDataset& train,
                                              const std::vector<Measure>& measures,
                                              const std::vector<std::vector<NodeId>>& targets,
                                              const ExperimentOptions& opts) {
    std::map<Measure, StateScores> out;
    switch (cfg.kind) {
    case ModelKind::network: {
        const auto net = fit_network(train);
        for (auto m : measures) {
            if (m != Measure::betweenness && m != Measure::closeness)
                continue;
            out[m] = centrality(net, m, opts.centrality).scores;
        }
        break;
    }
    case ModelKind::path: {
        const auto model = PathModel::fit(train);
        const PathCentrality pc(model, opts.K_truth, opts.centrality.direction);
        for (auto m : measures)
            out[m] = pc.states(m).scores;
        break;
    }
    case ModelKind::mogen: {
        const auto model = fit_mogen(train, cfg.K);
        const MOGenCentrality mc(model, opts.centrality);
        for (auto m : measures) {
            out[m] = mc.suffixes(m, cfg.K).scores;
            if (opts.mogen_sequences)
                for (auto& [state, score] : mc.sequences(m, targets).scores)
                    out[m][state] = score;
        }
        break;
    }
    }
    return out;
}

} // namespace detail

/// Runs spec.replicates train/test splits; per replicate every model is fit
/// on the training paths and scored against each measure's ground truth.
/// Unsupported (model, measure) pairs produce no result.
inline std::vector<AUCResult> evaluate(const PathDataset& ds, const SplitSpec& spec,
                                       const std::vector<ModelConfig>& models, const std::vector<Measure>& measures,
                                       const ExperimentOptions& opts = {}) {
    if (spec.replicates < 1)
        throw InvalidArgument("at least one replicate is required");
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> per_cell;
    for (std::uint64_t r = 0; r < spec.replicates; ++r) {
        const auto [train, test] = split(ds, spec, r);
        std::vector<GroundTruth> truths;
        for (auto m : measures)
            truths.push_back(ground_truth(test, m, opts.K_truth, opts.centrality.direction));
        std::vector<std::vector<NodeId>> targets;
        if (!truths.empty())
            for (const auto& [state, score] : truths.front().ranking)
                targets.push_back(state);
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            const auto predictions = detail::predict(models[mi], train, measures, targets, opts);
            for (std::size_t ci = 0; ci < measures.size(); ++ci) {
                auto it = predictions.find(measures[ci]);
                if (it == predictions.end())
                    continue;
                per_cell[{ci, mi}].push_back(score_against(truths[ci], it->second, opts));
            }
        }
    }
    std::vector<AUCResult> results;
    for (const auto& [cell, values] : per_cell) {
        AUCResult res{models[cell.second].label(), measures[cell.first], 0.0, values};
        for (double v : values)
            res.mean += v;
        res.mean /= static_cast<double>(values.size());
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace mogen
