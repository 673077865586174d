#pragma once

#include "contourlab/ingest.hpp"
#include "contourlab/rational.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contourlab {

enum class Representation {
    pitch,
    centered,
    tonicized,
    finalized,
    normalized,
    intervals,
    smoothed_intervals,
    cosine,
};

inline constexpr std::array all_representations = {
    Representation::pitch,      Representation::centered,  Representation::tonicized,
    Representation::finalized,  Representation::normalized, Representation::intervals,
    Representation::smoothed_intervals, Representation::cosine,
};

std::string_view to_string(Representation representation);
Representation parse_representation(std::string_view name);

/// Values that may be compared against pitch thresholds (not intervals or cosine coefficients).
bool is_pitch_like(Representation representation);

struct ContourVector {
    std::string id;
    std::string source;
    Representation representation = Representation::pitch;
    std::vector<double> values;
    std::size_t length_notes = 0;
    Rational duration_qn{0};
    bool degenerate = false;  ///< set for constant contours under normalization
};

inline constexpr std::size_t default_samples = 50;
inline constexpr double default_smoothing_sigma = 2.0;

/// Samples a step curve through the phrase at times (i + 0.5) * T / n.
ContourVector step_curve_sample(const Phrase& phrase, std::size_t n = default_samples);

/// kind must be one of pitch, centered, tonicized, finalized, normalized.
ContourVector standardize(const ContourVector& contour, Representation kind, std::optional<int> tonic,
                          int final_pitch);

/// First differences; optionally smoothed with a boundary-renormalized Gaussian kernel.
ContourVector intervals(const ContourVector& contour, bool smooth, double sigma = default_smoothing_sigma);

/// Gaussian smoothing of a sequence: kernel truncated at +-4 sigma and renormalized at the edges.
std::vector<double> gaussian_smooth(std::span<const double> values, double sigma);

/// Orthonormal DCT-II coefficients 1..n_coef of a centered contour (the DC term is dropped).
ContourVector cosine_contour(const ContourVector& centered, std::size_t n_coef);

/// Orthonormal DCT-II basis vector of the given frequency, length n.
std::vector<double> dct_basis(std::size_t n, std::size_t frequency);

struct ContourOptions {
    std::size_t samples = default_samples;
    std::size_t cosine_coefficients = default_samples - 1;
    double smoothing_sigma = default_smoothing_sigma;
};

/// Full pipeline from a phrase to the requested representation.
ContourVector make_contour(const Phrase& phrase, Representation representation, const ContourOptions& options = {});

// Contour JSONL: {id, source, representation, values, length_notes, duration_qn, degenerate}.
std::string contour_to_json_line(const ContourVector& contour);
ContourVector contour_from_json_line(std::string_view line);
void write_contours(std::ostream& out, const std::vector<ContourVector>& contours);
std::vector<ContourVector> read_contours(const std::filesystem::path& path);

}  // namespace contourlab
