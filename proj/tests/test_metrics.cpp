#include "contourlab/error.hpp"
#include "contourlab/metrics.hpp"

#include "dtw_oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace contourlab;

namespace {

ContourVector contour(std::vector<double> values, Representation r = Representation::pitch) {
    ContourVector c;
    c.values = std::move(values);
    c.representation = r;
    return c;
}

}  // namespace

TEST(Euclidean, Basics) {
    const std::vector<double> a{0, 0}, b{3, 4};
    EXPECT_EQ(euclidean(a, a), 0.0);
    EXPECT_EQ(euclidean(a, b), 5.0);
    const std::vector<double> c{1, 2, 3};
    EXPECT_THROW(euclidean(a, c), DimensionError);
}

TEST(Euclidean, MetricProperties) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(10), b(10);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        EXPECT_EQ(euclidean(a, b), euclidean(b, a));
        EXPECT_GT(euclidean(a, b), 0.0);
    }
}

TEST(Dtw, IdentityAndWarp) {
    const std::vector<double> x{0, 0, 1, 1}, y{0, 1, 1, 1};
    EXPECT_EQ(dtw(x, x), 0.0);
    EXPECT_EQ(dtw(x, y), 0.0);
}

TEST(Dtw, DilatedCopyIsZero) {
    const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
    std::vector<double> dilated;
    for (double v : x) {
        dilated.push_back(v);
        dilated.push_back(v);
    }
    EXPECT_EQ(dtw(x, dilated), 0.0);
}

TEST(Dtw, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> value(-4, 4), length(1, 7);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(static_cast<std::size_t>(length(rng))), b(static_cast<std::size_t>(length(rng)));
        for (auto& v : a) v = value(rng);
        for (auto& v : b) v = value(rng);
        EXPECT_EQ(dtw(a, b), oracle::brute_force_dtw(a, b)) << "trial " << t;
        EXPECT_EQ(dtw(a, b), dtw(b, a));
    }
}

TEST(Dtw, HandComputedNormalization) {
    // Only alignment of [0] with [1, 1]: cost 2 over 2 steps.
    const std::vector<double> a{0}, b{1, 1};
    EXPECT_EQ(dtw(a, b), 1.0);
}

TEST(PairwiseSample, IdenticalContoursGiveZeros) {
    std::vector<ContourVector> cs{contour({1, 2, 3}), contour({1, 2, 3})};
    Rng rng(1);
    const auto s = pairwise_sample(cs, Metric::euclidean, 100, rng);
    EXPECT_EQ(s.values, std::vector<double>(100, 0.0));
}

TEST(PairwiseSample, CountDeterminismAndMetadata) {
    std::vector<ContourVector> cs;
    for (int i = 0; i < 20; ++i) cs.push_back(contour({double(i), double(i * i % 7), 1.0}));
    Rng a(5), b(5);
    const auto first = pairwise_sample(cs, Metric::euclidean, 30000, a);
    const auto second = pairwise_sample(cs, Metric::euclidean, 30000, b);
    EXPECT_EQ(first.values.size(), 30000u);
    EXPECT_EQ(first.values, second.values);
    EXPECT_EQ(first.pair_seed, second.pair_seed);
    EXPECT_EQ(first.metric, Metric::euclidean);
    EXPECT_EQ(first.representation, "pitch");
    for (double v : first.values) EXPECT_GE(v, 0.0);
}

TEST(PairwiseSample, NeverPairsAPointWithItself) {
    // Distinct contours: a self pair would be the only way to get a zero.
    std::vector<ContourVector> cs;
    for (int i = 0; i < 5; ++i) cs.push_back(contour({double(i)}));
    Rng rng(2);
    for (double v : pairwise_sample(cs, Metric::euclidean, 5000, rng).values) EXPECT_GT(v, 0.0);
}

TEST(PairwiseSample, UmapUsesEmbeddingRows) {
    std::vector<ContourVector> cs{contour({0.0}), contour({100.0}), contour({50.0})};
    Matrix embedding(3, 2);
    embedding << 0, 0, 0, 1, 0, 1;
    Rng rng(3);
    for (double v : pairwise_sample(cs, Metric::umap, 200, rng, &embedding).values) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(PairwiseSample, Errors) {
    std::vector<ContourVector> cs{contour({1, 2}), contour({2, 3})};
    Rng rng(1);
    EXPECT_THROW(pairwise_sample(cs, Metric::umap, 10, rng), Error);
    std::vector<ContourVector> cosine{contour({1, 2}, Representation::cosine), contour({2, 3}, Representation::cosine)};
    EXPECT_THROW(pairwise_sample(cosine, Metric::dtw, 10, rng), Error);
    std::vector<ContourVector> one{contour({1, 2})};
    EXPECT_THROW(pairwise_sample(one, Metric::euclidean, 10, rng), Error);
    EXPECT_THROW(parse_metric("cityblock"), Error);
}
