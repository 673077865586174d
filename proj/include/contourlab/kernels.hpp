#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin in
// `reference`; results are bitwise identical for any thread count because
// every output slot is written by exactly one iteration and every iteration
// owns its random sub-stream.

#include "contourlab/matrix.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace contourlab::kernels {

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;
using PairDistance = std::function<double(std::uint32_t, std::uint32_t)>;

/// distance(i, j) for every pair, in pair order.
std::vector<double> pair_distances(std::span<const IndexPair> pairs, const PairDistance& distance);

struct Neighbors {
    std::vector<std::uint32_t> index;  ///< row-major, rows x k, nearest first
    std::vector<double> distance;
    std::size_t k = 0;
};

/// Exact k nearest neighbours of every query row among `data` rows (Euclidean).
/// When `exclude_self` is set, query i skips data row i.
Neighbors knn(const Matrix& data, const Matrix& queries, std::size_t k, bool exclude_self);

/// Dip statistics of `replicates` sorted uniform samples of size n; replicate r draws
/// from sub-stream (seed, r).
std::vector<double> uniform_dips(std::size_t n, std::size_t replicates, std::uint64_t seed);

/// Index of the nearest centroid for every row, and the squared distance to it.
void assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<std::uint32_t>& labels,
                    std::vector<double>& squared_distance);

/// Sets the OpenMP thread count used by the kernels (0 keeps the runtime default).
void set_max_threads(int threads);
int max_threads();

namespace reference {

std::vector<double> pair_distances(std::span<const IndexPair> pairs, const PairDistance& distance);
Neighbors knn(const Matrix& data, const Matrix& queries, std::size_t k, bool exclude_self);
std::vector<double> uniform_dips(std::size_t n, std::size_t replicates, std::uint64_t seed);
void assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<std::uint32_t>& labels,
                    std::vector<double>& squared_distance);

}  // namespace reference

/// Sorted Uniform(0,1) sample of size n from normalized exponential spacings.
void sorted_uniform_sample(std::uint64_t seed, std::vector<double>& out, std::size_t n);

}  // namespace contourlab::kernels
