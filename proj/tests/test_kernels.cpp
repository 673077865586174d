#include "contourlab/kernels.hpp"
#include "contourlab/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace contourlab;

namespace {

Matrix gaussian(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
    return m;
}

class Kernels : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override {
        saved_ = kernels::max_threads();
        kernels::set_max_threads(GetParam());
    }
    void TearDown() override { kernels::set_max_threads(saved_); }
    int saved_ = 1;
};

}  // namespace

TEST_P(Kernels, PairDistances) {
    const Matrix data = gaussian(1, 60, 20);
    std::vector<kernels::IndexPair> pairs;
    for (std::uint32_t i = 0; i < 60; ++i)
        for (std::uint32_t j = i + 1; j < 60; j += 3) pairs.emplace_back(i, j);
    const kernels::PairDistance distance = [&](std::uint32_t i, std::uint32_t j) {
        const auto a = data.row(i), b = data.row(j);
        return dtw(std::span<const double>(a.data(), 20), std::span<const double>(b.data(), 20));
    };
    EXPECT_EQ(kernels::pair_distances(pairs, distance), kernels::reference::pair_distances(pairs, distance));
}

TEST_P(Kernels, Knn) {
    const Matrix data = gaussian(2, 300, 6);
    const Matrix queries = gaussian(3, 40, 6);
    for (bool self : {true, false}) {
        const auto& q = self ? data : queries;
        const auto fast = kernels::knn(data, q, 7, self);
        const auto slow = kernels::reference::knn(data, q, 7, self);
        EXPECT_EQ(fast.index, slow.index);
        EXPECT_EQ(fast.distance, slow.distance);
        EXPECT_EQ(fast.k, 7u);
    }
}

TEST_P(Kernels, UniformDips) {
    EXPECT_EQ(kernels::uniform_dips(150, 64, 99), kernels::reference::uniform_dips(150, 64, 99));
}

TEST_P(Kernels, AssignNearest) {
    const Matrix data = gaussian(4, 500, 5);
    const Matrix centroids = gaussian(5, 6, 5);
    std::vector<std::uint32_t> la, lb;
    std::vector<double> da, db;
    kernels::assign_nearest(data, centroids, la, da);
    kernels::reference::assign_nearest(data, centroids, lb, db);
    EXPECT_EQ(la, lb);
    EXPECT_EQ(da, db);
}

INSTANTIATE_TEST_SUITE_P(Threads, Kernels, ::testing::Values(1, 2, 4));

TEST(KernelsBasics, KnnMatchesBruteForce) {
    const Matrix data = gaussian(6, 50, 3);
    const auto nn = kernels::reference::knn(data, data, 3, true);
    for (Eigen::Index i = 0; i < 50; ++i) {
        double best = 1e300;
        Eigen::Index arg = -1;
        for (Eigen::Index j = 0; j < 50; ++j) {
            if (j == i) continue;
            const double d = (data.row(i) - data.row(j)).norm();
            if (d < best) best = d, arg = j;
        }
        EXPECT_EQ(nn.index[static_cast<std::size_t>(i) * 3], static_cast<std::uint32_t>(arg));
        EXPECT_NEAR(nn.distance[static_cast<std::size_t>(i) * 3], best, 1e-12);
    }
}

TEST(KernelsBasics, SortedUniformSample) {
    std::vector<double> x;
    kernels::sorted_uniform_sample(3, x, 1000);
    ASSERT_EQ(x.size(), 1000u);
    EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
    EXPECT_GT(x.front(), 0.0);
    EXPECT_LT(x.back(), 1.0);
    double mean = 0;
    for (double v : x) mean += v;
    EXPECT_NEAR(mean / 1000.0, 0.5, 0.05);
}
