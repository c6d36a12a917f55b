#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "generators.hpp"
#include "mogen/experiment.hpp"
#include "oracles.hpp"

using namespace mogen;
namespace oracle = mogen::testkit::oracle;

namespace {

double mean_of(const std::vector<AUCResult>& results, const std::string& model, Measure m) {
    for (const auto& r : results)
        if (r.model == model && r.measure == m)
            return r.mean;
    ADD_FAILURE() << "missing cell " << model << " " << to_string(m);
    return NAN;
}

} // namespace

TEST(Split, DeterministicAndBinomial) {
    std::vector<Path> ones;
    for (std::size_t i = 0; i < 1000; ++i)
        ones.push_back(Path{{"A", testkit::node_name(i)}});
    const PathDataset big(ones);
    const SplitSpec spec{0.3, 42, 5};
    const auto [train, test] = split(big, spec);
    EXPECT_EQ(train.total_count() + test.total_count(), 1000u);
    // 300 +- 4.5 standard deviations
    EXPECT_NEAR(static_cast<double>(train.total_count()), 300.0, 65.0);
    const auto [train2, test2] = split(big, spec);
    EXPECT_EQ(train2.paths().size(), train.paths().size());
    for (std::size_t i = 0; i < train.paths().size(); ++i)
        EXPECT_EQ(train.paths()[i].nodes, train2.paths()[i].nodes);
    const auto [train3, test3] = split(big, spec, 1);
    bool differs = train3.paths().size() != train.paths().size();
    for (std::size_t i = 0; !differs && i < train.paths().size(); ++i)
        differs = train.paths()[i].nodes != train3.paths()[i].nodes;
    EXPECT_TRUE(differs);
}

TEST(Split, TwoInstancesOneEach) {
    const PathDataset ds({Path{{"A"}}, Path{{"B"}}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [train, test] = split(ds, SplitSpec{0.5, seed, 1});
        EXPECT_EQ(train.total_count(), 1u);
        EXPECT_EQ(test.total_count(), 1u);
    }
}

TEST(Split, MultiplicitiesStraddle) {
    const PathDataset ds({Path{{"A", "B"}, 3, {}}, Path{{"C"}, 1, {}}});
    bool straddled = false;
    for (std::uint64_t seed = 0; seed < 50 && !straddled; ++seed) {
        const auto [train, test] = split(ds, SplitSpec{0.5, seed, 1});
        std::uint64_t in_train = 0, in_test = 0;
        for (const auto& p : train.paths())
            if (p.nodes.size() == 2)
                in_train += p.count;
        for (const auto& p : test.paths())
            if (p.nodes.size() == 2)
                in_test += p.count;
        EXPECT_EQ(in_train + in_test, 3u);
        straddled = in_train > 0 && in_test > 0;
    }
    EXPECT_TRUE(straddled);
}

TEST(Split, Errors) {
    EXPECT_THROW(split(PathDataset({Path{{"A"}}}), SplitSpec{0.5, 0, 1}), DataError);
    EXPECT_THROW(split(PathDataset({Path{{"A"}, 2, {}}}), SplitSpec{1.0, 0, 1}), InvalidArgument);
    EXPECT_THROW(split(PathDataset({Path{{"A"}, 2, {}}}), SplitSpec{0.0, 0, 1}), InvalidArgument);
    // two instances can never be split when the fraction is this extreme
    EXPECT_THROW(split(PathDataset({Path{{"A"}, 2, {}}}), SplitSpec{1e-9, 0, 1}), DataError);
}

TEST(GroundTruth, PathEndRanking) {
    const PathDataset test({Path{{"A", "B"}, 9, {}}, Path{{"A", "C"}, 1, {}}});
    const auto gt = ground_truth(test, Measure::path_end, 1);
    ASSERT_EQ(gt.ranking.size(), 3u);
    EXPECT_EQ(gt.ranking[0].first, std::vector<NodeId>{"B"});
    EXPECT_DOUBLE_EQ(gt.ranking[0].second, 0.9);
    EXPECT_EQ(gt.ranking[1].first, std::vector<NodeId>{"C"});
    EXPECT_DOUBLE_EQ(gt.ranking[1].second, 0.1);
    EXPECT_EQ(gt.ranking[2].first, std::vector<NodeId>{"A"});
}

TEST(GroundTruth, TiesAreLexicographic) {
    const auto gt = rank_scores(Measure::betweenness, {{{"C"}, 1.0}, {{"A"}, 1.0}, {{"B", "A"}, 1.0}, {{"B"}, 1.0}});
    EXPECT_EQ(gt.ranking[0].first, std::vector<NodeId>{"A"});
    EXPECT_EQ(gt.ranking[1].first, std::vector<NodeId>{"B"});
    EXPECT_EQ(gt.ranking[2].first, (std::vector<NodeId>{"B", "A"}));
    EXPECT_EQ(gt.ranking[3].first, std::vector<NodeId>{"C"});
}

TEST(GroundTruth, HigherOrderStatesFromSubPaths) {
    SplitMix64 rng(5);
    const auto test = testkit::random_dataset(rng);
    const auto gt = ground_truth(test, Measure::betweenness, 2);
    const auto counts = oracle::count_sequences(test, 2);
    ASSERT_EQ(gt.ranking.size(), counts.size());
    for (std::size_t i = 0; i < gt.ranking.size(); ++i) {
        EXPECT_EQ(gt.ranking[i].second, counts.at(gt.ranking[i].first).interior);
        if (i > 0) {
            EXPECT_GE(gt.ranking[i - 1].second, gt.ranking[i].second);
        }
    }
    EXPECT_THROW(ground_truth(test, Measure::betweenness, 0), InvalidArgument);
}

TEST(ProjectUp, LongestSuffixWins) {
    EXPECT_EQ(*project_up({{{"A"}, 1.0}, {{"B"}, 2.0}}, {{"A", "B"}})[0], 2.0);
    EXPECT_EQ(*project_up({{{"A", "B"}, 7.0}, {{"B"}, 2.0}}, {{"C", "A", "B"}})[0], 7.0);
}

TEST(ProjectUp, UnmatchedFallback) {
    const StateScores scores{{{"A"}, 3.0}, {{"B"}, -1.0}};
    EXPECT_EQ(*project_up(scores, {{"C"}})[0], -1.0);
    EXPECT_FALSE(project_up(scores, {{"C"}}, UnmatchedTargets::exclude)[0].has_value());
}

TEST(Auc, PerfectInvertedAndTies) {
    const std::vector<bool> labels{true, true, false, false, false};
    EXPECT_DOUBLE_EQ(auc(labels, std::vector<double>{5, 4, 3, 2, 1}), 1.0);
    EXPECT_DOUBLE_EQ(auc(labels, std::vector<double>{1, 2, 3, 4, 5}), 0.0);
    EXPECT_DOUBLE_EQ(auc(labels, std::vector<double>{1, 1, 1, 1, 1}), 0.5);
    EXPECT_THROW(auc(std::vector<bool>{true, true}, std::vector<double>{1, 2}), InvalidArgument);
    EXPECT_THROW(auc(labels, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(Auc, MatchesPairwiseOracle) {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        std::vector<bool> labels(n);
        std::vector<double> scores(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = rng.bernoulli(0.3);
            scores[i] = static_cast<double>(rng.below(8)); // many ties
        }
        labels[0] = true;
        labels[1] = false;
        EXPECT_NEAR(auc(labels, scores), oracle::pairwise_auc(labels, scores), 1e-12);
    }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(100);
        std::vector<bool> labels(n);
        std::vector<double> scores(n), transformed(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = rng.bernoulli(0.2);
            scores[i] = rng.uniform() * 10.0 - 5.0;
            transformed[i] = std::exp(scores[i]) * 3.0 + 1.0;
        }
        labels[0] = true;
        labels[1] = false;
        EXPECT_DOUBLE_EQ(auc(labels, scores), auc(labels, transformed));
    }
}

TEST(Auc, RandomScoresNearOneHalf) {
    SplitMix64 rng(17);
    double total = 0.0;
    for (int r = 0; r < 5; ++r) {
        std::vector<bool> labels(10000);
        std::vector<double> scores(10000);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = i < 1000;
            scores[i] = rng.uniform();
        }
        total += auc(labels, scores);
    }
    EXPECT_NEAR(total / 5.0, 0.5, 0.02);
}

TEST(Labels, CeilingOfTenPercent) {
    GroundTruth gt;
    for (int i = 0; i < 11; ++i)
        gt.ranking.push_back({{testkit::node_name(static_cast<std::size_t>(i))}, 11.0 - i});
    const auto labels = top_decile_labels(gt);
    EXPECT_EQ(std::count(labels.begin(), labels.end(), true), 2);
    EXPECT_TRUE(labels[0] && labels[1] && !labels[2]);
}

TEST(Labels, PerOrderPooling) {
    GroundTruth gt;
    for (int i = 0; i < 10; ++i)
        gt.ranking.push_back({{testkit::node_name(static_cast<std::size_t>(i)), "Z"}, 100.0 - i});
    for (int i = 0; i < 10; ++i)
        gt.ranking.push_back({{testkit::node_name(static_cast<std::size_t>(i))}, 50.0 - i});
    const auto mixed = top_decile_labels(gt, false);
    EXPECT_TRUE(mixed[0] && mixed[1] && !mixed[10]);
    const auto pooled = top_decile_labels(gt, true);
    EXPECT_TRUE(pooled[0] && !pooled[1] && pooled[10] && !pooled[11]);
}

TEST(ScoreAgainst, IdentityAndNegation) {
    GroundTruth gt;
    StateScores same, negated;
    for (int i = 0; i < 30; ++i) {
        const std::vector<NodeId> s{testkit::node_name(static_cast<std::size_t>(i))};
        gt.ranking.push_back({s, 30.0 - i});
        same[s] = 30.0 - i;
        negated[s] = i - 30.0;
    }
    EXPECT_DOUBLE_EQ(score_against(gt, same, {}), 1.0);
    EXPECT_DOUBLE_EQ(score_against(gt, negated, {}), 0.0);
    gt.ranking.resize(9);
    try {
        score_against(gt, same, {});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("target set too small for decile labeling"), std::string::npos);
    }
}

TEST(ModelConfig, Labels) {
    EXPECT_EQ(ModelConfig::parse("N").label(), "N");
    EXPECT_EQ(ModelConfig::parse("P").label(), "P");
    EXPECT_EQ(ModelConfig::parse("M3").K, 3u);
    EXPECT_EQ(ModelConfig::parse("M12").label(), "M12");
    EXPECT_THROW(ModelConfig::parse("M0"), InvalidArgument);
    EXPECT_THROW(ModelConfig::parse("X"), InvalidArgument);
}

TEST(Evaluate, DeterministicAndBounded) {
    SplitMix64 rng(21);
    const auto ds = testkit::TwoFamilyGenerator{}.generate(rng, 300);
    const std::vector<ModelConfig> models{ModelConfig::parse("N"), ModelConfig::parse("M2"), ModelConfig::parse("P")};
    const std::vector<Measure> measures{Measure::betweenness, Measure::path_end, Measure::closeness};
    const auto a = evaluate(ds, SplitSpec{0.3, 7, 3}, models, measures);
    const auto b = evaluate(ds, SplitSpec{0.3, 7, 3}, models, measures);
    ASSERT_EQ(a.size(), b.size());
    // network has no path_end cell
    EXPECT_EQ(a.size(), 8u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].replicates, b[i].replicates);
        EXPECT_EQ(a[i].replicates.size(), 3u);
        for (double x : a[i].replicates) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0);
        }
    }
}

TEST(Evaluate, SecondOrderModelBeatsUnderAndOverfitting) {
    SplitMix64 rng(1);
    const auto ds = testkit::TwoFamilyGenerator{}.generate(rng, 1000);
    const std::vector<ModelConfig> models{ModelConfig::parse("N"), ModelConfig::parse("M2"), ModelConfig::parse("P")};
    const auto res = evaluate(ds, SplitSpec{0.1, 1, 5}, models, {Measure::betweenness, Measure::path_end});
    EXPECT_GT(mean_of(res, "M2", Measure::betweenness), mean_of(res, "N", Measure::betweenness));
    EXPECT_GT(mean_of(res, "M2", Measure::betweenness), mean_of(res, "P", Measure::betweenness));
    EXPECT_GT(mean_of(res, "M2", Measure::path_end), mean_of(res, "P", Measure::path_end));
}

TEST(Evaluate, RicherDataShrinksTheGapToThePathModel) {
    // few distinct paths: observations per unique path grow with the sample size
    testkit::TwoFamilyGenerator gen;
    gen.endpoints_per_family = 3;
    gen.middle_nodes = 1;
    gen.p_end = 0.6;
    const std::vector<ModelConfig> models{ModelConfig::parse("M2"), ModelConfig::parse("P")};
    std::vector<double> gaps;
    for (std::size_t n : {300u, 3000u, 30000u}) {
        double gap = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            SplitMix64 rng(seed);
            const auto ds = gen.generate(rng, n);
            const auto res = evaluate(ds, SplitSpec{0.1, seed, 5}, models, {Measure::betweenness});
            gap += mean_of(res, "M2", Measure::betweenness) - mean_of(res, "P", Measure::betweenness);
        }
        gaps.push_back(gap / 3.0);
    }
    EXPECT_GT(gaps[0], gaps[1]);
    EXPECT_GT(gaps[1], gaps[2]);
}

TEST(Evaluate, LiteralProjectionMatchesPathModelOnShortTargets) {
    // with K_truth <= K the chain reproduces the training counts, so the
    // projected predictions agree up to rounding (AUCs may still differ
    // where rounding splits exact ties)
    SplitMix64 rng(3);
    const auto ds = testkit::TwoFamilyGenerator{}.generate(rng, 400);
    const auto [train, test] = split(ds, SplitSpec{0.3, 3, 1}, 0);
    ExperimentOptions opts;
    opts.K_truth = 2;
    opts.mogen_sequences = false;
    const std::vector<Measure> measures{Measure::betweenness, Measure::path_end, Measure::visitation};
    for (auto m : measures) {
        std::vector<std::vector<NodeId>> targets;
        for (const auto& [state, x] : ground_truth(test, m, 2).ranking)
            targets.push_back(state);
        const auto mogen = detail::predict(ModelConfig::parse("M2"), train, {m}, targets, opts).at(m);
        const auto path = detail::predict(ModelConfig::parse("P"), train, {m}, targets, opts).at(m);
        const auto a = project_up(mogen, targets);
        const auto b = project_up(path, targets);
        for (std::size_t i = 0; i < targets.size(); ++i)
            EXPECT_NEAR(*a[i], *b[i], 1e-9) << to_string(m);
    }
}

TEST(Evaluate, Errors) {
    const PathDataset ds({Path{{"A", "B"}, 5, {}}});
    EXPECT_THROW(evaluate(ds, SplitSpec{0.5, 0, 0}, {ModelConfig{}}, {Measure::betweenness}), InvalidArgument);
    EXPECT_THROW(evaluate(ds, SplitSpec{0.5, 0, 1}, {ModelConfig{}}, {Measure::betweenness}), DataError);
}
