#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cepdist/cepdist.hpp"
#include "support.hpp"

using namespace cepdist;

namespace {

std::vector<SignalRecord> generator_corpus(std::uint64_t seed, std::size_t length = 4096) {
    std::vector<SignalRecord> out;
    for (int g = 0; g < 2; ++g) {
        const auto zpk = ZeroPoleGain::from_roots({g == 0 ? 0.5 : 0.95}, {});
        for (int r = 0; r < 10; ++r) {
            const auto u = white_noise(length, seed * 1000 + static_cast<std::uint64_t>(g * 10 + r));
            out.push_back({"g" + std::to_string(g) + "_" + std::to_string(r), filter_zpk(zpk, u), u});
        }
    }
    return out;
}

DistanceMatrix from_points(const std::vector<double>& x) {
    DistanceMatrix dm{{}, Metric::euclidean, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()),
                                                                   static_cast<Eigen::Index>(x.size())),
                      {},
                      {}};
    for (std::size_t a = 0; a < x.size(); ++a) {
        dm.ids.push_back(std::to_string(a));
        for (std::size_t b = 0; b < x.size(); ++b)
            dm.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = std::abs(x[a] - x[b]);
    }
    return dm;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

} // namespace

TEST(Parsing, MetricAndLinkageNames) {
    EXPECT_EQ(parse_metric("cepstral"), Metric::cepstral);
    EXPECT_EQ(parse_linkage("complete"), Linkage::complete);
    EXPECT_THROW(parse_metric("manhattan"), Error);
    EXPECT_THROW(parse_linkage("ward"), Error);
}

TEST(DistanceMatrix, IdenticalSignalsGiveZeroMatrix) {
    const auto y = white_noise(512, 1);
    std::vector<SignalRecord> recs{{"a", y, y}, {"b", y, y}, {"c", y, y}};
    for (Metric m : {Metric::euclidean, Metric::cosine, Metric::cepstral}) {
        const auto dm = distance_matrix(recs, m);
        EXPECT_LE(dm.values.cwiseAbs().maxCoeff(), 1e-15) << to_string(m);
        EXPECT_TRUE(dm.failures.empty());
    }
}

TEST(DistanceMatrix, SymmetricWithExactZeroDiagonal) {
    const auto recs = generator_corpus(3, 1024);
    for (Metric m : {Metric::euclidean, Metric::cosine, Metric::cepstral}) {
        const auto dm = distance_matrix(recs, m);
        ASSERT_EQ(dm.size(), recs.size());
        for (Eigen::Index a = 0; a < dm.values.rows(); ++a) {
            EXPECT_EQ(dm.values(a, a), 0.0);
            for (Eigen::Index b = 0; b < dm.values.cols(); ++b) {
                EXPECT_NEAR(dm.values(a, b), dm.values(b, a), 1e-10);
                EXPECT_GE(dm.values(a, b), 0.0);
            }
        }
    }
}

TEST(DistanceMatrix, MotivatingSignalsUnderCepstralMetric) {
    const auto ex = make_example_signals();
    std::vector<SignalRecord> recs{{"sin", ex.sine, {}}, {"cos", ex.cosine, {}}, {"noise", ex.noise, {}}};
    DistanceConfig config;
    config.estimator = {SpectrumMethod::periodogram, 0, 0.5, 2048};
    config.K = 1024;
    const auto dm = distance_matrix(recs, Metric::cepstral, config);
    const double sc = dm.values(0, 1), sn = dm.values(0, 2), cn = dm.values(1, 2);
    EXPECT_LT(sc, 0.1 * sn);
    EXPECT_LT(sc, 0.1 * cn);
}

TEST(DistanceMatrix, FailuresPoisonEntriesAndExcludeSignals) {
    const auto u = white_noise(4096, 9);
    std::vector<SignalRecord> recs{{"min1", filter_zpk(benchmark_min_phase(), u), u},
                                   {"mixed", filter_zpk(benchmark_mixed(), u), u},
                                   {"min2", filter_zpk(ZeroPoleGain::from_roots({0.5}, {}), u), u}};
    const auto dm = distance_matrix(recs, Metric::subspace);
    EXPECT_TRUE(dm.failed(0, 1));
    EXPECT_TRUE(dm.failed(1, 2));
    EXPECT_FALSE(dm.failed(0, 2));
    ASSERT_FALSE(dm.failures.empty());
    EXPECT_EQ(dm.failures.front().code, ErrorCode::NotMinimumPhaseStable);
    EXPECT_EQ(dm.poisoned(), std::vector<std::size_t>{1});
    const auto result = agglomerative_cluster(dm, Linkage::average, 2);
    EXPECT_EQ(result.labels, (std::vector<int>{0, -1, 1}));
    EXPECT_EQ(result.excluded, std::vector<std::size_t>{1});
}

TEST(DistanceMatrix, SubspaceNeedsInput) {
    const auto y = white_noise(1024, 1);
    const auto dm = distance_matrix({{"a", y, {}}, {"b", y, {}}}, Metric::subspace);
    EXPECT_TRUE(dm.failed(0, 1));
    EXPECT_THROW(distance_matrix({{"a", y, {}}}, Metric::euclidean), Error);
}

TEST(Cluster, ExtremeCounts) {
    const auto dm = from_points({0.0, 1.0, 5.0, 5.5, 9.0});
    EXPECT_EQ(agglomerative_cluster(dm, Linkage::single, 5).labels, (std::vector<int>{0, 1, 2, 3, 4}));
    EXPECT_EQ(agglomerative_cluster(dm, Linkage::single, 1).labels, (std::vector<int>(5, 0)));
    EXPECT_THROW(agglomerative_cluster(dm, Linkage::single, 0), Error);
    EXPECT_THROW(agglomerative_cluster(dm, Linkage::single, 6), Error);
}

TEST(Cluster, KnownLinkageResults) {
    const auto dm = from_points({0.0, 1.0, 5.0, 5.5, 9.0});
    const auto single = agglomerative_cluster(dm, Linkage::single, 2);
    EXPECT_EQ(single.labels, (std::vector<int>{0, 0, 1, 1, 1}));
    EXPECT_EQ(single.merge_heights, (std::vector<double>{0.5, 1.0, 3.5}));
    const auto complete = agglomerative_cluster(dm, Linkage::complete, 2);
    EXPECT_EQ(complete.labels, (std::vector<int>{0, 0, 1, 1, 1}));
    EXPECT_EQ(complete.merge_heights, (std::vector<double>{0.5, 1.0, 4.0}));
    const auto average = agglomerative_cluster(dm, Linkage::average, 3);
    EXPECT_EQ(average.labels, (std::vector<int>{0, 0, 1, 1, 2}));
}

TEST(Cluster, TiesMergeLowestIndicesFirst) {
    const auto dm = from_points({0.0, 1.0, 2.0, 3.0});
    const auto r = agglomerative_cluster(dm, Linkage::single, 3);
    EXPECT_EQ(r.labels, (std::vector<int>{0, 0, 1, 2}));
}

TEST(Cluster, MergeHeightsMonotone) {
    support::RootSampler sampler(51);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(15);
        for (double& v : x) v = sampler.uniform(-10, 10);
        for (Linkage l : {Linkage::single, Linkage::complete, Linkage::average}) {
            const auto r = agglomerative_cluster(from_points(x), l, 1);
            ASSERT_EQ(r.merge_heights.size(), 14u);
            for (std::size_t k = 1; k < r.merge_heights.size(); ++k)
                EXPECT_GE(r.merge_heights[k], r.merge_heights[k - 1] - 1e-12);
        }
    }
}

TEST(Cluster, PermutationInvariance) {
    support::RootSampler sampler(52);
    std::vector<double> x(12);
    for (double& v : x) v = sampler.uniform(0, 100);
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (int trial = 0; trial < 10; ++trial) {
        std::rotate(perm.begin(), perm.begin() + 5, perm.end());
        std::swap(perm[static_cast<std::size_t>(trial) % perm.size()], perm[(static_cast<std::size_t>(trial) * 7 + 3) % perm.size()]);
        std::vector<double> shuffled(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) shuffled[a] = x[perm[a]];
        for (Linkage l : {Linkage::single, Linkage::complete, Linkage::average}) {
            const auto base = agglomerative_cluster(from_points(x), l, 4).labels;
            const auto moved = agglomerative_cluster(from_points(shuffled), l, 4).labels;
            std::vector<int> back(x.size());
            for (std::size_t a = 0; a < x.size(); ++a) back[perm[a]] = moved[a];
            EXPECT_TRUE(same_partition(base, back));
        }
    }
}

TEST(Cluster, RecoversTwoGenerators) {
    long correct = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto recs = generator_corpus(seed);
        const auto labels = agglomerative_cluster(distance_matrix(recs, Metric::cepstral), Linkage::average, 2).labels;
        for (std::size_t a = 0; a < recs.size(); ++a)
            for (std::size_t b = a + 1; b < recs.size(); ++b) {
                const bool same_truth = (a < 10) == (b < 10);
                correct += same_truth == (labels[a] == labels[b]);
                ++total;
            }
    }
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(total), 0.95);
}
