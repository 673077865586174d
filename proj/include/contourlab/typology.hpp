#pragma once

#include "contourlab/contour.hpp"
#include "contourlab/ingest.hpp"
#include "contourlab/matrix.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contourlab {

enum class HuronType {
    ascending,
    descending,
    convex,
    concave,
    horizontal,
    horizontal_ascending,
    ascending_horizontal,
    horizontal_descending,
    descending_horizontal,
};

std::string_view to_string(HuronType type);

inline constexpr std::array<std::string_view, 9> huron_labels = {
    "ascending",           "descending",           "convex",
    "concave",             "horizontal",           "horizontal-ascending",
    "ascending-horizontal", "horizontal-descending", "descending-horizontal",
};

/// Sizes of the initial, middle and final third (17/16/17 for 50 samples).
std::array<std::size_t, 3> huron_thirds(std::size_t n);

/// Huron type from mean values over the initial, middle and final thirds.
HuronType huron_type(const ContourVector& contour, double epsilon);

/// Huron's note-based variant: initial note, mean of the interior notes, final note.
HuronType huron_type_notes(const Phrase& phrase, double epsilon);

/// Adams rank code such as "3412" or "213"; constant phrases give "11".
std::string adams_type(const Phrase& phrase, double epsilon);

/// The 15 admissible Adams codes.
const std::vector<std::string>& adams_codes();

enum class Typology { huron, adams };
std::string_view to_string(Typology typology);
Typology parse_typology(std::string_view name);

struct TypeDistribution {
    std::vector<std::string> labels;  ///< every label of the typology, in canonical order
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    double entropy = 0.0;  ///< natural log

    std::size_t count(std::string_view label) const;
    double frequency(std::string_view label) const;
};

TypeDistribution distribution_from_labels(const std::vector<std::string>& labels, Typology typology);

/// Huron distribution over contours.
TypeDistribution type_distribution(const std::vector<ContourVector>& contours, double epsilon);
/// Adams distribution over phrases.
TypeDistribution type_distribution(const std::vector<Phrase>& phrases, double epsilon);

struct EpsilonSweep {
    double epsilon = 0.0;
    std::vector<double> grid;
    std::vector<double> entropy;
};

/// Regular grid start, start + step, ..., up to stop (inclusive, rounded against drift).
std::vector<double> epsilon_grid(double start, double stop, double step);

/// Entropy-maximizing tolerance; ties go to the smaller epsilon.
EpsilonSweep max_entropy_epsilon(const std::vector<ContourVector>& contours, std::span<const double> grid);
EpsilonSweep max_entropy_epsilon(const std::vector<Phrase>& phrases, std::span<const double> grid);

struct KMeansResult {
    std::size_t k = 0;
    Matrix centroids;
    std::vector<std::uint32_t> labels;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  ///< per Lloyd iteration of the winning restart
};

/// k-means++ seeding, Lloyd iterations (shift < 1e-8 or 300 iterations), best of `restarts`.
KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t restarts = 10);

struct AverageContour {
    std::vector<double> mean;
    std::vector<double> lower;  ///< mean - 1.96 se
    std::vector<double> upper;
    std::size_t count = 0;
};

AverageContour average_contour(const std::vector<ContourVector>& contours);

}  // namespace contourlab
