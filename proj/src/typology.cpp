#include "contourlab/typology.hpp"

#include "contourlab/error.hpp"
#include "contourlab/kernels.hpp"
#include "contourlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace contourlab {

std::string_view to_string(HuronType type) { return huron_labels[static_cast<std::size_t>(type)]; }

std::array<std::size_t, 3> huron_thirds(std::size_t n) {
    if (n < 3) throw InputError("huron typology needs at least 3 values");
    std::size_t outer = (n + 2) / 3;
    if (n < 2 * outer + 1) outer = n / 3;
    return {outer, n - 2 * outer, outer};
}

namespace {

enum class Order { less, equal, greater };

Order compare(double a, double b, double epsilon) {
    if (std::abs(a - b) <= epsilon) return Order::equal;
    return a < b ? Order::less : Order::greater;
}

HuronType classify(double initial, double middle, double final, double epsilon) {
    const Order first = compare(initial, middle, epsilon);
    const Order second = compare(middle, final, epsilon);
    using enum Order;
    if (first == less && second == greater) return HuronType::convex;
    if (first == greater && second == less) return HuronType::concave;
    if (first == less && second == less) return HuronType::ascending;
    if (first == greater && second == greater) return HuronType::descending;
    if (first == equal && second == equal) return HuronType::horizontal;
    if (first == equal && second == less) return HuronType::horizontal_ascending;
    if (first == less && second == equal) return HuronType::ascending_horizontal;
    if (first == equal && second == greater) return HuronType::horizontal_descending;
    return HuronType::descending_horizontal;
}

double mean_of(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

HuronType huron_type(const ContourVector& contour, double epsilon) {
    if (!is_pitch_like(contour.representation))
        throw InputError("huron typology is not defined for the " + std::string(to_string(contour.representation)) +
                         " representation");
    if (epsilon < 0) throw InputError("tolerance must be non-negative");
    const auto sizes = huron_thirds(contour.values.size());
    const std::span<const double> values(contour.values);
    return classify(mean_of(values.subspan(0, sizes[0])), mean_of(values.subspan(sizes[0], sizes[1])),
                    mean_of(values.subspan(sizes[0] + sizes[1], sizes[2])), epsilon);
}

HuronType huron_type_notes(const Phrase& phrase, double epsilon) {
    if (phrase.notes.size() < 3) throw InputError("note-based huron typology needs at least 3 notes");
    const auto pitches = phrase.pitches();
    double middle = 0.0;
    for (std::size_t i = 1; i + 1 < pitches.size(); ++i) middle += pitches[i];
    middle /= static_cast<double>(pitches.size() - 2);
    return classify(pitches.front(), middle, pitches.back(), epsilon);
}

std::string adams_type(const Phrase& phrase, double epsilon) {
    if (phrase.notes.empty()) throw InputError("adams typology of an empty phrase");
    if (epsilon < 0) throw InputError("tolerance must be non-negative");
    const auto pitches = phrase.pitches();
    const std::size_t last = pitches.size() - 1;
    const auto lowest = static_cast<std::size_t>(std::min_element(pitches.begin(), pitches.end()) - pitches.begin());
    const auto highest = static_cast<std::size_t>(std::max_element(pitches.begin(), pitches.end()) - pitches.begin());

    // Boundary values I, F, L, H merged into single-link classes under epsilon.
    std::array<double, 4> values = {static_cast<double>(pitches.front()), static_cast<double>(pitches.back()),
                                    static_cast<double>(pitches[lowest]), static_cast<double>(pitches[highest])};
    std::array<double, 4> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::array<int, 4> sorted_rank{};
    int rank = 1;
    sorted_rank[0] = 1;
    for (std::size_t i = 1; i < 4; ++i) {
        if (sorted[i] - sorted[i - 1] > epsilon) ++rank;
        sorted_rank[i] = rank;
    }
    auto rank_of = [&](double v) {
        return sorted_rank[static_cast<std::size_t>(std::find(sorted.begin(), sorted.end(), v) - sorted.begin())];
    };
    const int initial = rank_of(values[0]), final = rank_of(values[1]);
    const int low = rank_of(values[2]), high = rank_of(values[3]);

    auto interior_and_distinct = [&](std::size_t index, int r) {
        return index > 0 && index < last && r != initial && r != final;
    };
    std::vector<std::pair<std::size_t, int>> middle;
    if (interior_and_distinct(highest, high)) middle.emplace_back(highest, high);
    if (interior_and_distinct(lowest, low)) middle.emplace_back(lowest, low);
    std::sort(middle.begin(), middle.end());

    std::string code = std::to_string(initial);
    for (const auto& [index, r] : middle) code += std::to_string(r);
    code += std::to_string(final);
    return code;
}

const std::vector<std::string>& adams_codes() {
    static const std::vector<std::string> codes = {
        "11", "12", "21", "121", "132", "231", "212", "213", "312",
        "2312", "2413", "3412", "2132", "2143", "3142",
    };
    return codes;
}

std::string_view to_string(Typology typology) { return typology == Typology::huron ? "huron" : "adams"; }

Typology parse_typology(std::string_view name) {
    if (name == "huron") return Typology::huron;
    if (name == "adams") return Typology::adams;
    throw InputError("unknown typology '" + std::string(name) + "'");
}

std::size_t TypeDistribution::count(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return counts[i];
    return 0;
}

double TypeDistribution::frequency(std::string_view label) const {
    return total == 0 ? 0.0 : static_cast<double>(count(label)) / static_cast<double>(total);
}

TypeDistribution distribution_from_labels(const std::vector<std::string>& labels, Typology typology) {
    if (labels.empty()) throw InputError("type distribution of an empty set");
    TypeDistribution out;
    if (typology == Typology::huron) {
        out.labels.assign(huron_labels.begin(), huron_labels.end());
    } else {
        out.labels = adams_codes();
    }
    out.counts.assign(out.labels.size(), 0);
    for (const auto& label : labels) {
        auto it = std::find(out.labels.begin(), out.labels.end(), label);
        if (it == out.labels.end()) throw InputError("label '" + label + "' is not part of the typology");
        ++out.counts[static_cast<std::size_t>(it - out.labels.begin())];
    }
    out.total = labels.size();
    for (std::size_t c : out.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(out.total);
        out.entropy -= p * std::log(p);
    }
    out.entropy = std::max(out.entropy, 0.0);
    return out;
}

TypeDistribution type_distribution(const std::vector<ContourVector>& contours, double epsilon) {
    std::vector<std::string> labels(contours.size());
    for (std::size_t i = 0; i < contours.size(); ++i) labels[i] = std::string(to_string(huron_type(contours[i], epsilon)));
    return distribution_from_labels(labels, Typology::huron);
}

TypeDistribution type_distribution(const std::vector<Phrase>& phrases, double epsilon) {
    std::vector<std::string> labels(phrases.size());
    for (std::size_t i = 0; i < phrases.size(); ++i) labels[i] = adams_type(phrases[i], epsilon);
    return distribution_from_labels(labels, Typology::adams);
}

std::vector<double> epsilon_grid(double start, double stop, double step) {
    if (!(step > 0) || stop < start) throw InputError("invalid epsilon grid");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        const double value = start + step * static_cast<double>(i);
        grid.push_back(std::round(value * 1e9) / 1e9);
    }
    return grid;
}

namespace {

template <typename Items>
EpsilonSweep sweep(const Items& items, std::span<const double> grid) {
    if (items.empty() || grid.empty()) throw InputError("epsilon sweep needs items and a grid");
    EpsilonSweep out;
    out.grid.assign(grid.begin(), grid.end());
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out.entropy.push_back(type_distribution(items, grid[g]).entropy);
        // Smaller epsilon wins ties.
        const bool better = out.entropy[g] > out.entropy[best] ||
                            (out.entropy[g] == out.entropy[best] && grid[g] < grid[best]);
        if (better) best = g;
    }
    out.epsilon = grid[best];
    return out;
}

}  // namespace

EpsilonSweep max_entropy_epsilon(const std::vector<ContourVector>& contours, std::span<const double> grid) {
    return sweep(contours, grid);
}

EpsilonSweep max_entropy_epsilon(const std::vector<Phrase>& phrases, std::span<const double> grid) {
    return sweep(phrases, grid);
}

// --------------------------------------------------------------------------- k-means

namespace {

Matrix kmeans_plus_plus(const Matrix& data, std::size_t k, Rng& rng) {
    const auto n = static_cast<std::size_t>(data.rows());
    Matrix centroids(static_cast<Eigen::Index>(k), data.cols());
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.row(0) = data.row(static_cast<Eigen::Index>(first(rng)));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = (data.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(c - 1))).squaredNorm();
            nearest[i] = std::min(nearest[i], d2);
            total += nearest[i];
        }
        std::size_t chosen = n - 1;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += nearest[i];
                if (acc > target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = first(rng);
        }
        centroids.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(chosen));
    }
    return centroids;
}

KMeansResult lloyd(const Matrix& data, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    KMeansResult result;
    result.k = k;
    result.seed = seed;
    result.centroids = kmeans_plus_plus(data, k, rng);

    std::vector<double> distance;
    for (std::size_t iter = 0; iter < 300; ++iter) {
        kernels::assign_nearest(data, result.centroids, result.labels, distance);
        result.inertia_trace.push_back(std::accumulate(distance.begin(), distance.end(), 0.0));
        ++result.iterations;

        Matrix updated = Matrix::Zero(static_cast<Eigen::Index>(k), data.cols());
        std::vector<std::size_t> sizes(k, 0);
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            updated.row(result.labels[static_cast<std::size_t>(i)]) += data.row(i);
            ++sizes[result.labels[static_cast<std::size_t>(i)]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) {
                updated.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
                continue;
            }
            // Empty cluster: move it to the point worst served by its centroid.
            const auto worst = static_cast<std::size_t>(std::max_element(distance.begin(), distance.end()) - distance.begin());
            updated.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(worst));
            distance[worst] = 0.0;
        }
        const double shift = (updated - result.centroids).rowwise().norm().maxCoeff();
        result.centroids = std::move(updated);
        if (shift < 1e-8) break;
    }
    kernels::assign_nearest(data, result.centroids, result.labels, distance);
    result.inertia = std::accumulate(distance.begin(), distance.end(), 0.0);
    return result;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t restarts) {
    if (k == 0) throw InputError("kmeans needs k >= 1");
    if (static_cast<std::size_t>(data.rows()) < k) throw InputError("kmeans needs at least k rows");
    if (!data.allFinite()) throw InputError("kmeans: non-finite input");
    restarts = std::max<std::size_t>(restarts, 1);

    KMeansResult best;
    for (std::size_t r = 0; r < restarts; ++r) {
        KMeansResult candidate = lloyd(data, k, derive_seed(seed, r));
        if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
    }
    best.seed = seed;
    return best;
}

AverageContour average_contour(const std::vector<ContourVector>& contours) {
    if (contours.empty()) throw InputError("average of an empty contour set");
    const auto representation = contours.front().representation;
    const std::size_t n = contours.front().values.size();
    for (const auto& c : contours) {
        if (c.representation != representation) throw InputError("average_contour: mixed representations");
        if (c.values.size() != n) throw DimensionError("average_contour: mixed contour lengths");
    }
    AverageContour out;
    out.count = contours.size();
    out.mean.assign(n, 0.0);
    for (const auto& c : contours)
        for (std::size_t i = 0; i < n; ++i) out.mean[i] += c.values[i];
    for (auto& v : out.mean) v /= static_cast<double>(contours.size());

    std::vector<double> se(n, 0.0);
    if (contours.size() > 1) {
        for (const auto& c : contours)
            for (std::size_t i = 0; i < n; ++i) se[i] += (c.values[i] - out.mean[i]) * (c.values[i] - out.mean[i]);
        for (auto& v : se) v = std::sqrt(v / static_cast<double>(contours.size() - 1) / static_cast<double>(contours.size()));
    }
    out.lower.resize(n);
    out.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.lower[i] = out.mean[i] - 1.96 * se[i];
        out.upper[i] = out.mean[i] + 1.96 * se[i];
    }
    return out;
}

}  // namespace contourlab
