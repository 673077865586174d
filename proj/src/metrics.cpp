#include "contourlab/metrics.hpp"

#include "contourlab/error.hpp"
#include "contourlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contourlab {

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::euclidean: return "euclidean";
        case Metric::dtw: return "dtw";
        case Metric::umap: return "umap";
    }
    return "euclidean";
}

Metric parse_metric(std::string_view name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "dtw") return Metric::dtw;
    if (name == "umap") return Metric::umap;
    throw InputError("unknown metric '" + std::string(name) + "'");
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("euclidean: length mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double dtw(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InputError("dtw: empty sequence");
    const std::size_t m = b.size();
    // Rolling rows of (accumulated cost, path length).
    std::vector<double> cost_prev(m), cost_cur(m);
    std::vector<std::uint32_t> len_prev(m), len_cur(m);

    auto better = [](double c1, std::uint32_t l1, double c2, std::uint32_t l2) {
        return c1 < c2 || (c1 == c2 && l1 < l2);
    };

    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double local = std::abs(a[i] - b[j]);
            double best_cost;
            std::uint32_t best_len;
            if (i == 0 && j == 0) {
                best_cost = 0.0;
                best_len = 0;
            } else {
                best_cost = std::numeric_limits<double>::infinity();
                best_len = 0;
                if (i > 0 && j > 0 && better(cost_prev[j - 1], len_prev[j - 1], best_cost, best_len)) {
                    best_cost = cost_prev[j - 1];
                    best_len = len_prev[j - 1];
                }
                if (i > 0 && better(cost_prev[j], len_prev[j], best_cost, best_len)) {
                    best_cost = cost_prev[j];
                    best_len = len_prev[j];
                }
                if (j > 0 && better(cost_cur[j - 1], len_cur[j - 1], best_cost, best_len)) {
                    best_cost = cost_cur[j - 1];
                    best_len = len_cur[j - 1];
                }
            }
            cost_cur[j] = best_cost + local;
            len_cur[j] = best_len + 1;
        }
        std::swap(cost_prev, cost_cur);
        std::swap(len_prev, len_cur);
    }
    return cost_prev[m - 1] / static_cast<double>(len_prev[m - 1]);
}

DistanceSample pairwise_sample(const std::vector<ContourVector>& contours, Metric metric, std::size_t m, Rng& rng,
                               const Matrix* embedding) {
    if (contours.size() < 2) throw InputError("pairwise sample needs at least 2 contours");
    if (m == 0) throw InputError("pairwise sample needs m > 0");
    if (metric == Metric::umap) {
        if (embedding == nullptr) throw InputError("umap metric requires a fitted embedding");
        if (static_cast<std::size_t>(embedding->rows()) != contours.size())
            throw DimensionError("embedding rows do not match contour count");
    }
    if (metric == Metric::dtw && contours.front().representation == Representation::cosine)
        throw InputError("dtw is not defined for cosine contours");
    for (const auto& contour : contours) {
        if (contour.values.empty()) throw InputError("pairwise sample: empty contour '" + contour.id + "'");
        if (metric == Metric::euclidean && contour.values.size() != contours.front().values.size())
            throw DimensionError("pairwise sample: contours differ in length");
    }

    DistanceSample out;
    out.metric = metric;
    out.representation = std::string(to_string(contours.front().representation));
    out.dataset = contours.front().source;
    out.pair_seed = rng();

    Rng pair_rng(out.pair_seed);
    const auto n = static_cast<std::uint32_t>(contours.size());
    std::uniform_int_distribution<std::uint32_t> first(0, n - 1), second(0, n - 2);
    std::vector<kernels::IndexPair> pairs(m);
    for (auto& pair : pairs) {
        const std::uint32_t i = first(pair_rng);
        std::uint32_t j = second(pair_rng);
        if (j >= i) ++j;
        pair = {std::min(i, j), std::max(i, j)};
    }

    kernels::PairDistance distance;
    switch (metric) {
        case Metric::euclidean:
            distance = [&](std::uint32_t i, std::uint32_t j) { return euclidean(contours[i].values, contours[j].values); };
            break;
        case Metric::dtw:
            distance = [&](std::uint32_t i, std::uint32_t j) { return dtw(contours[i].values, contours[j].values); };
            break;
        case Metric::umap:
            distance = [&](std::uint32_t i, std::uint32_t j) { return (embedding->row(i) - embedding->row(j)).norm(); };
            break;
    }
    out.values = kernels::pair_distances(pairs, distance);
    return out;
}

}  // namespace contourlab
