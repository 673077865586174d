// Wall-clock comparison of each OpenMP kernel against its serial reference.
// Usage: bench_kernels [repeats]

#include "contourlab/kernels.hpp"
#include "contourlab/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

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

template <class F>
double best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const std::string& name, double parallel, double serial, bool same) {
    std::printf("%-16s parallel %8.4fs  reference %8.4fs  speedup %5.2fx  %s\n", name.c_str(), parallel, serial,
                serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads: %d\n", kernels::max_threads());

    const Matrix contours = gaussian(1, 2000, 50);
    std::vector<kernels::IndexPair> pairs;
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::uint32_t> pick(0, 1999);
    while (pairs.size() < 20000) {
        const auto i = pick(rng), j = pick(rng);
        if (i != j) pairs.emplace_back(i, j);
    }
    const kernels::PairDistance distance = [&](std::uint32_t i, std::uint32_t j) {
        return dtw(std::span<const double>(contours.row(i).data(), 50), std::span<const double>(contours.row(j).data(), 50));
    };
    std::vector<double> a, b;
    report("pair_distances", best_of(repeats, [&] { a = kernels::pair_distances(pairs, distance); }),
           best_of(repeats, [&] { b = kernels::reference::pair_distances(pairs, distance); }), a == b);

    kernels::Neighbors na, nb;
    report("knn", best_of(repeats, [&] { na = kernels::knn(contours, contours, 15, true); }),
           best_of(repeats, [&] { nb = kernels::reference::knn(contours, contours, 15, true); }), na.index == nb.index);

    report("uniform_dips", best_of(repeats, [&] { a = kernels::uniform_dips(5000, 200, 3); }),
           best_of(repeats, [&] { b = kernels::reference::uniform_dips(5000, 200, 3); }), a == b);

    const Matrix points = gaussian(4, 25000, 49);
    const Matrix centroids = gaussian(5, 5, 49);
    std::vector<std::uint32_t> la, lb;
    report("assign_nearest", best_of(repeats, [&] { kernels::assign_nearest(points, centroids, la, a); }),
           best_of(repeats, [&] { kernels::reference::assign_nearest(points, centroids, lb, b); }), la == lb && a == b);
    return 0;
}
