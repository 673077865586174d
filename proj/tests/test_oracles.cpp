// Checks of the test oracles themselves against hand-worked cases.

#include "dip_oracle.hpp"
#include "dtw_oracle.hpp"
#include "simplex.hpp"

#include <gtest/gtest.h>

TEST(Simplex, SmallProblems) {
    // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6  ->  x = 1.6, y = 1.2
    oracle::LinearProgram lp{{{1, 2}, {3, 1}}, {oracle::Sense::le, oracle::Sense::le}, {4, 6}, {-1, -1}};
    EXPECT_NEAR(*oracle::solve_lp(lp), -2.8, 1e-12);
    // min x + y  s.t. x + y >= 2, x - y = 0
    oracle::LinearProgram eq{{{1, 1}, {1, -1}}, {oracle::Sense::ge, oracle::Sense::eq}, {2, 0}, {1, 1}};
    EXPECT_NEAR(*oracle::solve_lp(eq), 2.0, 1e-12);
    // infeasible: x <= 1, x >= 2
    oracle::LinearProgram bad{{{1}, {1}}, {oracle::Sense::le, oracle::Sense::ge}, {1, 2}, {1}};
    EXPECT_FALSE(oracle::solve_lp(bad).has_value());
}

TEST(DipOracle, EquallySpacedIsHalfOverN) {
    for (std::size_t n : {5u, 8u, 12u}) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
        EXPECT_NEAR(oracle::brute_force_dip(x), 0.5 / static_cast<double>(n), 1e-12);
    }
}

TEST(DipOracle, TwoClumpsIsLarge) {
    EXPECT_GT(oracle::brute_force_dip({0, 0.01, 0.02, 0.03, 10, 10.01, 10.02, 10.03}), 0.2);
}

TEST(DtwOracle, HandCases) {
    EXPECT_EQ(oracle::brute_force_dtw({0, 0, 1}, {0, 1}), 0.0);
    EXPECT_EQ(oracle::brute_force_dtw({0}, {2}), 2.0);
    // [0,1] vs [1,0]: every path costs 2; the diagonal is the shortest, 2 steps.
    EXPECT_DOUBLE_EQ(oracle::brute_force_dtw({0, 1}, {1, 0}), 1.0);
}
