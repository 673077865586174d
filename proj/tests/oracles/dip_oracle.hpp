#pragma once

// Brute-force dip: for every candidate mode, the smallest d such that some non-decreasing
// piecewise-linear CDF through the sorted sample, convex left of the mode and concave
// right of it, with values in [0, 1], stays within d of both i/n and (i+1)/n at the
// i-th sample point. Each mode is one linear program solved in
// exact arithmetic; the dip is the minimum over modes.

#include "simplex.hpp"

#include <algorithm>
#include <vector>

namespace oracle {

inline double brute_force_dip(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    if (n < 2) return 0.5;
    // Tied values are separated by an exact offset far below every real gap, which is the
    // limit the hull construction describes: a tie behaves as a cluster of nearby points.
    Rational gap = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > x[i - 1] && Rational(x[i]) - Rational(x[i - 1]) < gap) gap = Rational(x[i]) - Rational(x[i - 1]);
    const Rational delta = gap / Rational(1000000000000L) / static_cast<long>(n);
    std::vector<Rational> v(n), left(n), right(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = x[i];
        if (i > 0 && x[i] == x[i - 1]) v[i] = v[i - 1] + delta;
        left[i] = Rational(static_cast<long>(i), static_cast<long>(n));
        right[i] = Rational(static_cast<long>(i + 1), static_cast<long>(n));
        left[i].canonicalize();
        right[i].canonicalize();
    }
    const std::size_t vars = n + 1;  // y_0..y_{n-1}, d

    Rational best = -1;
    for (std::size_t mode = 0; mode < n; ++mode) {
        LinearProgram lp;
        lp.c.assign(vars, 0);
        lp.c[n] = 1;
        auto add = [&](std::vector<Rational> row, Sense s, Rational b) {
            lp.a.push_back(std::move(row));
            lp.sense.push_back(s);
            lp.b.push_back(std::move(b));
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Rational> row(vars, 0);
            row[i] = 1;
            add(row, Sense::le, 1);  // y_i <= 1
            row[n] = 1;
            add(row, Sense::ge, right[i]);  // y_i + d >= F(x_i)
            row[n] = -1;
            add(row, Sense::le, left[i]);  // y_i - d <= F(x_i-)
            if (i + 1 < n) {
                std::vector<Rational> step(vars, 0);
                step[i] = 1;
                step[i + 1] = -1;
                add(step, Sense::le, 0);  // y_i <= y_{i+1}
            }
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (i == mode) continue;
            const Rational h0 = v[i] - v[i - 1];
            const Rational h1 = v[i + 1] - v[i];
            std::vector<Rational> row(vars, 0);
            row[i - 1] = 1 / h0;
            row[i] = -1 / h0 - 1 / h1;
            row[i + 1] = 1 / h1;
            // slope change >= 0 left of the mode, <= 0 right of it
            add(row, i < mode ? Sense::ge : Sense::le, 0);
        }
        if (const auto value = solve_lp_exact(lp); value && (best < 0 || *value < best)) best = *value;
    }
    // A sample's dip is never below 1/(2n).
    const Rational floor(1, 2 * static_cast<long>(n));
    return (best < floor ? floor : best).get_d();
}

}  // namespace oracle
