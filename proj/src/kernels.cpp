#include "contourlab/kernels.hpp"

#include "contourlab/error.hpp"
#include "contourlab/random.hpp"
#include "contourlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace contourlab::kernels {

namespace {

// Nearest-k selection for a single query; ties broken by lower index.
void knn_row(const Matrix& data, const Matrix& queries, std::size_t q, std::size_t k, bool exclude_self,
             std::uint32_t* index_out, double* distance_out, std::vector<std::pair<double, std::uint32_t>>& scratch) {
    scratch.clear();
    const auto rows = static_cast<std::size_t>(data.rows());
    for (std::size_t i = 0; i < rows; ++i) {
        if (exclude_self && i == q) continue;
        const double d2 = (data.row(static_cast<Eigen::Index>(i)) - queries.row(static_cast<Eigen::Index>(q))).squaredNorm();
        scratch.emplace_back(d2, static_cast<std::uint32_t>(i));
    }
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
    for (std::size_t j = 0; j < k; ++j) {
        index_out[j] = scratch[j].second;
        distance_out[j] = std::sqrt(scratch[j].first);
    }
}

void check_knn(const Matrix& data, const Matrix& queries, std::size_t k, bool exclude_self) {
    if (data.cols() != queries.cols()) throw DimensionError("knn: dimension mismatch");
    const auto available = static_cast<std::size_t>(data.rows()) - (exclude_self ? 1 : 0);
    if (k == 0 || k > available) throw InputError("knn: k exceeds available points");
}

double dip_of_uniform(std::size_t n, std::uint64_t seed, std::vector<double>& scratch) {
    sorted_uniform_sample(seed, scratch, n);
    return dip_statistic_sorted(scratch);
}

void assign_row(const Matrix& data, const Matrix& centroids, std::size_t i, std::uint32_t& label, double& best) {
    best = std::numeric_limits<double>::infinity();
    label = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        const double d2 = (data.row(static_cast<Eigen::Index>(i)) - centroids.row(c)).squaredNorm();
        if (d2 < best) {
            best = d2;
            label = static_cast<std::uint32_t>(c);
        }
    }
}

}  // namespace

void sorted_uniform_sample(std::uint64_t seed, std::vector<double>& out, std::size_t n) {
    Rng rng(seed);
    std::exponential_distribution<double> exponential(1.0);
    out.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += exponential(rng);
        out[i] = total;
    }
    total += exponential(rng);
    for (auto& v : out) v /= total;
}

// --------------------------------------------------------------------------- parallel

std::vector<double> pair_distances(std::span<const IndexPair> pairs, const PairDistance& distance) {
    std::vector<double> out(pairs.size());
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < count; ++p) out[static_cast<std::size_t>(p)] = distance(pairs[p].first, pairs[p].second);
    return out;
}

Neighbors knn(const Matrix& data, const Matrix& queries, std::size_t k, bool exclude_self) {
    check_knn(data, queries, k, exclude_self);
    Neighbors out;
    out.k = k;
    const auto rows = static_cast<std::size_t>(queries.rows());
    out.index.resize(rows * k);
    out.distance.resize(rows * k);
#pragma omp parallel
    {
        std::vector<std::pair<double, std::uint32_t>> scratch;
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(rows); ++q) {
            const auto row = static_cast<std::size_t>(q);
            knn_row(data, queries, row, k, exclude_self, &out.index[row * k], &out.distance[row * k], scratch);
        }
    }
    return out;
}

std::vector<double> uniform_dips(std::size_t n, std::size_t replicates, std::uint64_t seed) {
    std::vector<double> out(replicates);
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(replicates); ++r)
            out[static_cast<std::size_t>(r)] = dip_of_uniform(n, derive_seed(seed, static_cast<std::uint64_t>(r)), scratch);
    }
    return out;
}

void assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<std::uint32_t>& labels,
                    std::vector<double>& squared_distance) {
    const auto rows = static_cast<std::ptrdiff_t>(data.rows());
    labels.resize(static_cast<std::size_t>(rows));
    squared_distance.resize(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto row = static_cast<std::size_t>(i);
        assign_row(data, centroids, row, labels[row], squared_distance[row]);
    }
}

void set_max_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// --------------------------------------------------------------------------- serial

namespace reference {

std::vector<double> pair_distances(std::span<const IndexPair> pairs, const PairDistance& distance) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) out.push_back(distance(i, j));
    return out;
}

Neighbors knn(const Matrix& data, const Matrix& queries, std::size_t k, bool exclude_self) {
    check_knn(data, queries, k, exclude_self);
    Neighbors out;
    out.k = k;
    const auto rows = static_cast<std::size_t>(queries.rows());
    out.index.resize(rows * k);
    out.distance.resize(rows * k);
    std::vector<std::pair<double, std::uint32_t>> scratch;
    for (std::size_t q = 0; q < rows; ++q)
        knn_row(data, queries, q, k, exclude_self, &out.index[q * k], &out.distance[q * k], scratch);
    return out;
}

std::vector<double> uniform_dips(std::size_t n, std::size_t replicates, std::uint64_t seed) {
    std::vector<double> out(replicates), scratch;
    for (std::size_t r = 0; r < replicates; ++r) out[r] = dip_of_uniform(n, derive_seed(seed, r), scratch);
    return out;
}

void assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<std::uint32_t>& labels,
                    std::vector<double>& squared_distance) {
    const auto rows = static_cast<std::size_t>(data.rows());
    labels.resize(rows);
    squared_distance.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) assign_row(data, centroids, i, labels[i], squared_distance[i]);
}

}  // namespace reference

}  // namespace contourlab::kernels
