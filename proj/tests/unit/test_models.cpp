#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "generators.hpp"
#include "mogen/models.hpp"
#include "oracles.hpp"

using namespace mogen;

namespace {

PathDataset toy() {
    return PathDataset({Path{{"A", "C", "D", "E"}, 1, {}}, Path{{"B", "C", "D", "F"}, 1, {}}});
}

std::vector<std::string> labels(const std::vector<HigherOrderState>& states) {
    std::vector<std::string> out;
    for (const auto& s : states)
        out.push_back(s.label());
    return out;
}

double T(const MOGenModel& m, const std::vector<NodeId>& from, const std::vector<NodeId>& to) {
    const auto i = m.find(m.vocabulary().intern(from));
    const auto j = m.find(m.vocabulary().intern(to));
    if (!i || !j)
        return 0.0;
    return m.transition(*i, *j);
}

/// Probability of the exact node sequence as a whole path under the chain.
double path_probability(const MOGenModel& m, const std::vector<NodeId>& nodes) {
    double p = 1.0;
    std::optional<std::size_t> prev;
    for (const auto& tuple : encode_tuples<NodeId>(nodes, m.order())) {
        const auto s = m.find(m.vocabulary().intern(tuple));
        if (!s)
            return 0.0;
        p *= prev ? m.transition(*prev, *s) : m.start()[*s];
        prev = s;
    }
    return p * m.end()[*prev];
}

} // namespace

TEST(Encoding, FirstOrder) {
    EXPECT_EQ(labels(encode_path(Path{{"A", "C", "D", "E"}}, 1)),
              (std::vector<std::string>{"*", "A", "C", "D", "E", "\xE2\x80\xA0"}));
}

TEST(Encoding, ThirdOrderSlidesAtK) {
    EXPECT_EQ(labels(encode_path(Path{{"A", "C", "D", "E"}}, 3)),
              (std::vector<std::string>{"*", "A", "A|C", "A|C|D", "C|D|E", "\xE2\x80\xA0"}));
}

TEST(Encoding, SecondOrder) {
    EXPECT_EQ(labels(encode_path(Path{{"A", "C", "D", "E"}}, 2)),
              (std::vector<std::string>{"*", "A", "A|C", "C|D", "D|E", "\xE2\x80\xA0"}));
}

TEST(Encoding, LengthAndErrors) {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        Path p;
        for (std::size_t j = 0; j < 1 + rng.below(8); ++j)
            p.nodes.push_back(testkit::node_name(rng.below(4)));
        const std::size_t K = 1 + rng.below(5);
        const auto enc = encode_path(p, K);
        ASSERT_EQ(enc.size(), p.nodes.size() + 2); // l + 1 transitions
        for (std::size_t j = 1; j + 1 < enc.size(); ++j) {
            EXPECT_LE(enc[j].nodes.size(), K);
            EXPECT_EQ(enc[j].nodes.back(), p.nodes[j - 1]);
        }
    }
    EXPECT_THROW(encode_path(Path{{"A"}}, 0), InvalidArgument);
    EXPECT_THROW(encode_path(Path{{}}, 1), InvalidArgument);
}

TEST(FitMogen, SingleNodePath) {
    const auto m = fit_mogen(PathDataset({Path{{"A"}}}), 1);
    ASSERT_EQ(m.state_count(), 1u);
    EXPECT_EQ(m.start()[0], 1.0);
    EXPECT_EQ(m.end()[0], 1.0);
    EXPECT_TRUE(m.transitions()[0].empty());
}

TEST(FitMogen, FirstOrderToy) {
    const auto m = fit_mogen(toy(), 1);
    EXPECT_DOUBLE_EQ(T(m, {"C"}, {"D"}), 1.0);
    EXPECT_DOUBLE_EQ(T(m, {"D"}, {"E"}), 0.5);
    EXPECT_DOUBLE_EQ(T(m, {"D"}, {"F"}), 0.5);
}

TEST(FitMogen, MemorySeparatesDestinations) {
    const auto m = fit_mogen(toy(), 3);
    EXPECT_DOUBLE_EQ(T(m, {"A", "C", "D"}, {"C", "D", "E"}), 1.0);
    EXPECT_DOUBLE_EQ(T(m, {"B", "C", "D"}, {"C", "D", "F"}), 1.0);
    EXPECT_DOUBLE_EQ(T(m, {"A", "C", "D"}, {"C", "D", "F"}), 0.0);
}

TEST(FitMogen, Errors) {
    EXPECT_THROW(fit_mogen(PathDataset{}, 1), DataError);
    EXPECT_THROW(fit_mogen(toy(), 0), InvalidArgument);
}

TEST(FitMogen, RowStochasticAndStartSumsToOne) {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const auto ds = testkit::random_dataset(rng);
        const auto m = fit_mogen(ds, 1 + rng.below(4));
        double s = 0.0;
        for (double x : m.start())
            s += x;
        EXPECT_NEAR(s, 1.0, 1e-12);
        for (std::size_t i = 0; i < m.state_count(); ++i) {
            double row = m.end()[i];
            for (const auto& [j, p] : m.transitions()[i])
                row += p;
            EXPECT_NEAR(row, 1.0, 1e-12);
        }
    }
}

TEST(FitMogen, TransitionsGrowOrSlide) {
    SplitMix64 rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = fit_mogen(testkit::random_dataset(rng), 1 + rng.below(4));
        const std::size_t K = m.order();
        for (std::size_t i = 0; i < m.state_count(); ++i) {
            const auto& a = m.state(i);
            for (const auto& [j, p] : m.transitions()[i]) {
                const auto& b = m.state(j);
                if (a.size() < K) {
                    ASSERT_EQ(b.size(), a.size() + 1);
                    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
                } else {
                    ASSERT_EQ(b.size(), K);
                    EXPECT_TRUE(std::equal(a.begin() + 1, a.end(), b.begin()));
                }
            }
            if (m.start()[i] > 0.0) {
                EXPECT_EQ(a.size(), 1u);
            }
        }
    }
}

TEST(FitMogen, TrainingPathsHavePositiveLikelihood) {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ds = testkit::random_dataset(rng);
        const auto m = fit_mogen(ds, 1 + rng.below(4));
        EXPECT_TRUE(std::isfinite(m.log_likelihood(ds)));
        for (const auto& p : ds.paths())
            EXPECT_GT(path_probability(m, p.nodes), 0.0);
    }
}

TEST(FitMogen, LosslessAtMaximumLength) {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ds = testkit::random_dataset(rng, 5, 5, 60);
        const auto m = fit_mogen(ds, ds.max_length());
        std::map<std::vector<NodeId>, double> freq;
        for (const auto& p : ds.paths())
            freq[p.nodes] += static_cast<double>(p.count) / static_cast<double>(ds.total_count());
        double mass = 0.0;
        for (const auto& [nodes, f] : freq) {
            const double prob = path_probability(m, nodes);
            EXPECT_NEAR(prob, f, 1e-12);
            mass += prob;
        }
        EXPECT_NEAR(mass, 1.0, 1e-12);
    }
}

TEST(FitMogen, FirstOrderMatchesNetwork) {
    SplitMix64 rng(47);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ds = testkit::random_dataset(rng);
        const auto m = fit_mogen(ds, 1);
        const auto net = fit_network(ds);
        for (std::size_t i = 0; i < m.state_count(); ++i) {
            const auto v = net.vocabulary().at(m.vocabulary().label(m.state(i)[0]));
            double out = 0.0;
            for (const auto& [w, c] : net.successors(v))
                out += static_cast<double>(c);
            std::map<NodeId, double> expected;
            for (const auto& [w, c] : net.successors(v))
                expected[net.vocabulary().label(w)] = static_cast<double>(c) / out;
            std::map<NodeId, double> actual;
            for (const auto& [j, p] : m.transitions()[i])
                actual[m.vocabulary().label(m.state(j)[0])] = p;
            ASSERT_EQ(actual.size(), expected.size());
            for (const auto& [w, p] : expected) {
                // MOGen rows also carry END mass, so compare after renormalising
                const double continuing = 1.0 - m.end()[i];
                EXPECT_NEAR(actual[w] / continuing, p, 1e-12);
            }
        }
    }
}

TEST(FitMogen, JsonRoundTripIsExact) {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = fit_mogen(testkit::random_dataset(rng), 1 + rng.below(3));
        const auto back = MOGenModel::from_json(nlohmann::json::parse(m.to_json().dump()));
        ASSERT_EQ(back.state_count(), m.state_count());
        EXPECT_EQ(back.order(), m.order());
        EXPECT_EQ(back.start(), m.start());
        EXPECT_EQ(back.end(), m.end());
        EXPECT_EQ(back.transitions(), m.transitions());
        EXPECT_EQ(back.states(), m.states());
        EXPECT_EQ(back.path_count(), m.path_count());
    }
}

TEST(FitNetwork, ToyEdges) {
    const auto net = fit_network(toy());
    const auto& v = net.vocabulary();
    EXPECT_EQ(net.edge_count(), 5u);
    EXPECT_EQ(net.weight(v.at("A"), v.at("C")), 1u);
    EXPECT_EQ(net.weight(v.at("B"), v.at("C")), 1u);
    EXPECT_EQ(net.weight(v.at("C"), v.at("D")), 2u);
    EXPECT_EQ(net.weight(v.at("D"), v.at("E")), 1u);
    EXPECT_EQ(net.weight(v.at("D"), v.at("F")), 1u);
    EXPECT_EQ(net.weight(v.at("A"), v.at("D")), 0u);
}

TEST(FitNetwork, SingleNodePathsHaveNoEdges) {
    const auto net = fit_network(PathDataset({Path{{"A"}}, Path{{"B"}, 4}}));
    EXPECT_EQ(net.node_count(), 2u);
    EXPECT_EQ(net.edge_count(), 0u);
    EXPECT_THROW(fit_network(PathDataset{}), DataError);
}

TEST(FitPathModel, MergesTimestampsAndKeepsMultiset) {
    const auto pm = PathModel::fit(PathDataset({Path{{"A", "B"}, 2, 1}, Path{{"A", "B"}, 3, 9}, Path{{"C"}, 1, {}}}));
    EXPECT_EQ(pm.total_count(), 6u);
    ASSERT_EQ(pm.paths().size(), 2u);
    std::map<std::size_t, std::uint64_t> by_length;
    for (const auto& p : pm.paths())
        by_length[p.nodes.size()] += p.count;
    EXPECT_EQ(by_length[2], 5u);
    EXPECT_EQ(by_length[1], 1u);
}

TEST(Fundamental, NoTransitionsGivesIdentity) {
    const auto m = fit_mogen(PathDataset({Path{{"A"}}, Path{{"B"}}}), 1);
    const auto F = FundamentalMatrix(m).dense();
    EXPECT_TRUE(F.isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST(Fundamental, TwoStateChain) {
    const auto m = fit_mogen(PathDataset({Path{{"A", "B"}}}), 1);
    const auto F = FundamentalMatrix(m).dense();
    const auto a = *m.find(m.vocabulary().intern(std::vector<NodeId>{"A"}));
    const auto b = *m.find(m.vocabulary().intern(std::vector<NodeId>{"B"}));
    EXPECT_DOUBLE_EQ(F(a, a), 1.0);
    EXPECT_DOUBLE_EQ(F(a, b), 1.0);
    EXPECT_DOUBLE_EQ(F(b, b), 1.0);
    EXPECT_DOUBLE_EQ(F(b, a), 0.0);
}

TEST(Fundamental, ToyRowSum) {
    const auto m = fit_mogen(toy(), 1);
    const FundamentalMatrix F(m);
    const auto a = *m.find(m.vocabulary().intern(std::vector<NodeId>{"A"}));
    EXPECT_NEAR(F.row_sums()[a], 4.0, 1e-12);
}

TEST(Fundamental, AgreesWithGaussJordanOracle) {
    SplitMix64 rng(59);
    for (int trial = 0; trial < 60; ++trial) {
        const auto m = fit_mogen(testkit::random_dataset(rng), 1 + rng.below(4));
        const auto chain = testkit::oracle::dense_chain(m);
        const auto Fo = testkit::oracle::fundamental(chain.Q);
        const FundamentalMatrix F(m);
        const auto Fd = F.dense();
        const auto visits = testkit::oracle::start_visits(chain, Fo);
        for (std::size_t i = 0; i < m.state_count(); ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m.state_count(); ++j) {
                EXPECT_NEAR(Fd(i, j), Fo[i][j], 1e-9);
                row += Fo[i][j];
            }
            EXPECT_NEAR(F.row_sums()[i], row, 1e-9);
            EXPECT_NEAR(F.start_visits()[i], visits[i], 1e-9);
            EXPECT_GE(Fd(i, i), 1.0 - 1e-12);
        }
        const auto col = F.column(0);
        for (std::size_t i = 0; i < m.state_count(); ++i)
            EXPECT_NEAR(col[i], Fo[i][0], 1e-9);
        EXPECT_LT(testkit::oracle::fixed_point_residual(chain.Q, Fo), 1e-9);
    }
}

TEST(Fundamental, ReachFromPowerSeries) {
    // K=1 on {A->B, A->B->B}: residual length from A by summing Q^k
    const auto m = fit_mogen(PathDataset({Path{{"A", "B"}}, Path{{"A", "B", "B"}}}), 1);
    const auto chain = testkit::oracle::dense_chain(m);
    const std::size_t n = chain.Q.size();
    testkit::oracle::Matrix power(n, std::vector<double>(n, 0.0)), sum(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        power[i][i] = 1.0;
    for (int k = 0; k < 2000; ++k) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                sum[i][j] += power[i][j];
                mass = std::max(mass, power[i][j]);
            }
        if (mass < 1e-12)
            break;
        testkit::oracle::Matrix next(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    next[i][j] += power[i][l] * chain.Q[l][j];
        power = next;
    }
    const FundamentalMatrix F(m);
    const auto a = *m.find(m.vocabulary().intern(std::vector<NodeId>{"A"}));
    double row = 0.0;
    for (double x : sum[a])
        row += x;
    EXPECT_NEAR(F.row_sums()[a], row, 1e-9);
    // B continues to itself with probability 1/3: from A, 1 + 1/(1 - 1/3) visits
    EXPECT_NEAR(F.row_sums()[a], 2.5, 1e-12);
}

TEST(Fundamental, DenseLimitEnforced) {
    const auto m = fit_mogen(toy(), 1);
    EXPECT_THROW(FundamentalMatrix(m, FundamentalOptions{2}).dense(), InvalidArgument);
}

TEST(SelectOrder, FirstOrderWalksChooseOne) {
    SplitMix64 rng(61);
    EXPECT_EQ(select_order(testkit::first_order_walks(rng, 10000), 3), 1u);
}

TEST(SelectOrder, SecondOrderSignalAtD) {
    const PathDataset ds({Path{{"A", "C", "D", "E"}, 500, {}}, Path{{"B", "C", "D", "F"}, 500, {}}});
    EXPECT_GE(select_order(ds, 3), 2u);
}

TEST(SelectOrder, KMaxOneAndErrors) {
    EXPECT_EQ(select_order(toy(), 1), 1u);
    EXPECT_THROW(select_order(toy(), 0), InvalidArgument);
    EXPECT_THROW(select_order(PathDataset{}, 2), DataError);
}

TEST(SelectOrder, AicUsesStatedDof) {
    const auto scores = order_scores(toy(), 3);
    ASSERT_EQ(scores.size(), 3u);
    // K=1: START {A,B} -> 1, C: {D} -> 0, D: {E,F} -> 1, A, B, E, F rows -> 0
    EXPECT_EQ(scores[0].dof, 2u);
    EXPECT_NEAR(scores[0].log_likelihood, 2.0 * (std::log(0.5) + std::log(0.5)), 1e-12);
    EXPECT_NEAR(scores[0].aic, 2.0 * 2 - 2.0 * scores[0].log_likelihood, 1e-12);
    // K=2 still shares (C,D); K=3 separates the destinations and only START branches
    EXPECT_EQ(scores[1].dof, 2u);
    EXPECT_NEAR(scores[1].log_likelihood, scores[0].log_likelihood, 1e-12);
    EXPECT_EQ(scores[2].dof, 1u);
    EXPECT_NEAR(scores[2].log_likelihood, 2.0 * std::log(0.5), 1e-12);
}
