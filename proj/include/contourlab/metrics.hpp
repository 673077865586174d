#pragma once

#include "contourlab/contour.hpp"
#include "contourlab/matrix.hpp"
#include "contourlab/random.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contourlab {

enum class Metric { euclidean, dtw, umap };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

double euclidean(std::span<const double> a, std::span<const double> b);

/// DTW with steps {(1,0),(0,1),(1,1)} and cost |a_i - b_j|, divided by the length of
/// the optimal alignment path (among equal-cost paths, the shortest).
double dtw(std::span<const double> a, std::span<const double> b);

struct DistanceSample {
    std::vector<double> values;
    Metric metric = Metric::euclidean;
    std::string representation;
    std::string dataset;
    std::uint64_t pair_seed = 0;
};

inline constexpr std::size_t default_pair_count = 30000;

/// m unordered pairs (i != j) drawn uniformly with replacement; for the umap metric the
/// distance is Euclidean between rows of `embedding`.
DistanceSample pairwise_sample(const std::vector<ContourVector>& contours, Metric metric, std::size_t m, Rng& rng,
                               const Matrix* embedding = nullptr);

}  // namespace contourlab
