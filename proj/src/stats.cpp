#include "contourlab/stats.hpp"

#include "contourlab/error.hpp"
#include "contourlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace contourlab {

namespace {

void check_finite(std::span<const double> samples) {
    for (double v : samples)
        if (!std::isfinite(v)) throw InputError("dip: non-finite sample value");
}

}  // namespace

// Hartigan & Hartigan (1985) algorithm, working in count units on the sorted
// sample x[1..n] (1-based): the dip is the largest deviation between the
// empirical CDF and the greatest convex minorant / least concave majorant
// fitted outside the current modal interval [low, high]. The modal interval
// shrinks until the GCM-LCM gap inside it no longer exceeds the running dip.
double dip_statistic_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n == 0) throw InputError("dip: empty sample");
    check_finite(sorted);
    if (n < 4 || sorted.front() == sorted.back()) return 0.5 / static_cast<double>(n);

    // 1-based view.
    auto x = [&](std::size_t i) { return sorted[i - 1]; };
    using idx = std::ptrdiff_t;
    const auto N = static_cast<idx>(n);

    // Predecessor on the convex minorant of points (x_j, j), for each prefix end j.
    std::vector<idx> mn(n + 1), mj(n + 1);
    mn[1] = 1;
    for (idx j = 2; j <= N; ++j) {
        mn[j] = j - 1;
        for (;;) {
            const idx a = mn[j], b = mn[a];
            if (a == 1 || (x(j) - x(a)) * static_cast<double>(a - b) < (x(a) - x(b)) * static_cast<double>(j - a)) break;
            mn[j] = b;
        }
    }
    // Successor on the concave majorant, for each suffix start k.
    mj[n] = N;
    for (idx k = N - 1; k >= 1; --k) {
        mj[k] = k + 1;
        for (;;) {
            const idx a = mj[k], b = mj[a];
            if (a == N || (x(k) - x(a)) * static_cast<double>(a - b) < (x(a) - x(b)) * static_cast<double>(k - a)) break;
            mj[k] = b;
        }
    }

    std::vector<idx> gcm(n + 1), lcm(n + 1);
    double dip = 1.0;
    idx low = 1, high = N;

    for (;;) {
        // GCM change points from high down to low, LCM change points from low up to high.
        idx len_gcm = 1;
        gcm[1] = high;
        while (gcm[len_gcm] > low) {
            gcm[len_gcm + 1] = mn[gcm[len_gcm]];
            ++len_gcm;
        }
        idx len_lcm = 1;
        lcm[1] = low;
        while (lcm[len_lcm] < high) {
            lcm[len_lcm + 1] = mj[lcm[len_lcm]];
            ++len_lcm;
        }

        idx ig = len_gcm, ih = len_lcm;
        idx ix = len_gcm - 1, iv = 2;
        double gap = 0.0;
        if (len_gcm != 2 || len_lcm != 2) {
            do {
                const idx g = gcm[ix], l = lcm[iv];
                if (g > l) {
                    // next knot comes from the LCM: measure the GCM below it
                    const idx g1 = gcm[ix + 1];
                    const double d = static_cast<double>(l - g1 + 1) -
                                     (x(l) - x(g1)) * static_cast<double>(g - g1) / (x(g) - x(g1));
                    ++iv;
                    if (d >= gap) {
                        gap = d;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    // next knot comes from the GCM: measure the LCM above it
                    const idx l1 = lcm[iv - 1];
                    const double d = (x(g) - x(l1)) * static_cast<double>(l - l1) / (x(l) - x(l1)) -
                                     static_cast<double>(g - l1 - 1);
                    --ix;
                    if (d >= gap) {
                        gap = d;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                ix = std::max<idx>(ix, 1);
                iv = std::min(iv, len_lcm);
            } while (gcm[ix] != lcm[iv]);
        } else {
            gap = 1.0;
        }

        if (gap < dip) break;

        // Deviations of the ECDF from the GCM left of the modal interval ...
        double dip_left = 0.0;
        for (idx j = ig; j < len_gcm; ++j) {
            double worst = 1.0;
            const idx begin = gcm[j + 1], end = gcm[j];
            if (end - begin > 1 && x(end) != x(begin)) {
                const double slope = static_cast<double>(end - begin) / (x(end) - x(begin));
                for (idx t = begin; t <= end; ++t)
                    worst = std::max(worst, static_cast<double>(t - begin + 1) - (x(t) - x(begin)) * slope);
            }
            dip_left = std::max(dip_left, worst);
        }
        // ... and from the LCM right of it.
        double dip_right = 0.0;
        for (idx j = ih; j < len_lcm; ++j) {
            double worst = 1.0;
            const idx begin = lcm[j], end = lcm[j + 1];
            if (end - begin > 1 && x(end) != x(begin)) {
                const double slope = static_cast<double>(end - begin) / (x(end) - x(begin));
                for (idx t = begin; t <= end; ++t)
                    worst = std::max(worst, (x(t) - x(begin)) * slope - static_cast<double>(t - begin - 1));
            }
            dip_right = std::max(dip_right, worst);
        }
        dip = std::max({dip, dip_left, dip_right});

        if (low == gcm[ig] && high == lcm[ih]) break;
        low = gcm[ig];
        high = lcm[ih];
    }
    return dip / (2.0 * static_cast<double>(n));
}

double dip_statistic(std::span<const double> samples) {
    std::vector<double> sorted(samples.begin(), samples.end());
    check_finite(sorted);
    std::sort(sorted.begin(), sorted.end());
    return dip_statistic_sorted(sorted);
}

DipResult dip_test(std::span<const double> samples, std::size_t replicates, Rng& rng) {
    if (replicates == 0) throw InputError("dip test needs at least one replicate");
    if (samples.size() < 4) throw InputError("dip test needs at least 4 samples");
    DipResult result;
    result.n = samples.size();
    result.replicates = replicates;
    result.seed = rng();
    result.dip = dip_statistic(samples);

    const auto null_dips = kernels::uniform_dips(result.n, replicates, result.seed);
    const auto exceed = std::count_if(null_dips.begin(), null_dips.end(), [&](double d) { return d >= result.dip; });
    result.p_value = static_cast<double>(1 + exceed) / static_cast<double>(replicates + 1);
    return result;
}

DipResult dist_dip_test(const std::vector<ContourVector>& contours, Metric metric, std::size_t m,
                        std::size_t replicates, Rng& rng, const Matrix* embedding) {
    const auto sample = pairwise_sample(contours, metric, m, rng, embedding);
    return dip_test(sample.values, replicates, rng);
}

double silverman_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InputError("bandwidth needs at least 2 samples");
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, n - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0)) spread = sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

Density kde(std::span<const double> samples, std::optional<double> bandwidth, std::size_t grid_points) {
    if (samples.size() < 2) throw InputError("kde needs at least 2 samples");
    if (grid_points < 2) throw InputError("kde needs at least 2 grid points");
    Density out;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    if (bandwidth) {
        if (!(*bandwidth > 0)) throw InputError("kde bandwidth must be positive");
        out.bandwidth = *bandwidth;
    } else if (hi == lo) {
        out.degenerate = true;
        out.bandwidth = 1e-3 * std::max(1.0, std::abs(lo));
    } else {
        out.bandwidth = silverman_bandwidth(samples);
    }

    const double h = out.bandwidth;
    const double start = lo - 3.0 * h, stop = hi + 3.0 * h;
    out.grid.resize(grid_points);
    out.density.assign(grid_points, 0.0);
    const double step = (stop - start) / static_cast<double>(grid_points - 1);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double at = start + step * static_cast<double>(g);
        double acc = 0.0;
        for (double v : samples) {
            const double z = (at - v) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out.grid[g] = at;
        out.density[g] = acc * norm;
    }
    return out;
}

}  // namespace contourlab
