#pragma once

#include "contourlab/metrics.hpp"
#include "contourlab/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace contourlab {

/// Hartigans' dip of a sample; lies in [1/(2n), 0.25]. Samples with n < 4 return 1/(2n).
double dip_statistic(std::span<const double> samples);

/// Same, for a sample that is already sorted ascending.
double dip_statistic_sorted(std::span<const double> sorted);

struct DipResult {
    double dip = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t default_replicates = 2000;

/// Monte Carlo dip test against the uniform null; p = (1 + #{dip_rep >= dip_obs}) / (replicates + 1).
DipResult dip_test(std::span<const double> samples, std::size_t replicates, Rng& rng);

/// Dip test on a sample of pairwise distances between contours.
DipResult dist_dip_test(const std::vector<ContourVector>& contours, Metric metric, std::size_t m,
                        std::size_t replicates, Rng& rng, const Matrix* embedding = nullptr);

struct Density {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    bool degenerate = false;
};

/// Silverman's rule of thumb, 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE on an evenly spaced grid spanning the data range +-3 bandwidths.
Density kde(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt,
            std::size_t grid_points = 512);

}  // namespace contourlab
