#include "contourlab/contour.hpp"

#include "contourlab/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace contourlab {

namespace {

constexpr std::array<std::string_view, 8> representation_names = {
    "pitch", "centered", "tonicized", "finalized", "normalized", "intervals", "smoothed_intervals", "cosine",
};

}  // namespace

std::string_view to_string(Representation representation) {
    return representation_names[static_cast<std::size_t>(representation)];
}

Representation parse_representation(std::string_view name) {
    for (std::size_t i = 0; i < representation_names.size(); ++i)
        if (representation_names[i] == name) return static_cast<Representation>(i);
    throw InputError("unknown representation '" + std::string(name) + "'");
}

bool is_pitch_like(Representation representation) {
    switch (representation) {
        case Representation::intervals:
        case Representation::smoothed_intervals:
        case Representation::cosine:
            return false;
        default:
            return true;
    }
}

ContourVector step_curve_sample(const Phrase& phrase, std::size_t n) {
    if (n < 2) throw InputError("step-curve sampling needs at least 2 samples");
    if (phrase.notes.empty()) throw InputError("cannot sample an empty phrase");

    ContourVector out;
    out.id = phrase.id;
    out.source = phrase.source;
    out.representation = Representation::pitch;
    out.length_notes = phrase.notes.size();
    out.duration_qn = phrase.duration();
    out.values.resize(n);

    // Exact comparisons: t_i = T * (2i + 1) / (2n), note k is active on [start_k, start_k + d_k).
    const Rational total = out.duration_qn;
    std::size_t note = 0;
    Rational note_end = phrase.notes[0].duration;
    for (std::size_t i = 0; i < n; ++i) {
        const Rational t = total * Rational(static_cast<std::int64_t>(2 * i + 1), static_cast<std::int64_t>(2 * n));
        while (note + 1 < phrase.notes.size() && !(t < note_end)) {
            ++note;
            note_end += phrase.notes[note].duration;
        }
        out.values[i] = static_cast<double>(phrase.notes[note].pitch);
    }
    return out;
}

ContourVector standardize(const ContourVector& contour, Representation kind, std::optional<int> tonic,
                          int final_pitch) {
    if (contour.representation != Representation::pitch)
        throw InputError("standardize expects a pitch contour");
    ContourVector out = contour;
    out.representation = kind;
    auto shift = [&](double offset) {
        for (auto& v : out.values) v -= offset;
    };
    switch (kind) {
        case Representation::pitch:
            break;
        case Representation::centered: {
            const double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
                                static_cast<double>(out.values.size());
            shift(mean);
            break;
        }
        case Representation::tonicized:
            if (!tonic) throw MissingMetadata("tonicized representation of '" + contour.id + "' requires a tonic");
            shift(static_cast<double>(*tonic));
            break;
        case Representation::finalized:
            shift(static_cast<double>(final_pitch));
            break;
        case Representation::normalized: {
            const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
            const double min = *lo, range = *hi - *lo;
            if (range == 0.0) {
                std::fill(out.values.begin(), out.values.end(), 0.5);
                out.degenerate = true;
            } else {
                for (auto& v : out.values) v = (v - min) / range;
            }
            break;
        }
        default:
            throw InputError("standardize does not produce '" + std::string(to_string(kind)) + "'");
    }
    return out;
}

std::vector<double> gaussian_smooth(std::span<const double> values, double sigma) {
    if (!(sigma > 0)) return {values.begin(), values.end()};
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t k = -radius; k <= radius; ++k)
        kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));

    const auto n = static_cast<std::ptrdiff_t>(values.size());
    std::vector<double> out(values.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0, weight = 0.0;
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(-radius, -i); k <= std::min(radius, n - 1 - i); ++k) {
            const double w = kernel[static_cast<std::size_t>(k + radius)];
            acc += w * values[static_cast<std::size_t>(i + k)];
            weight += w;
        }
        out[static_cast<std::size_t>(i)] = acc / weight;
    }
    return out;
}

ContourVector intervals(const ContourVector& contour, bool smooth, double sigma) {
    if (contour.values.size() < 2) throw InputError("intervals need at least 2 samples");
    ContourVector out = contour;
    out.representation = smooth ? Representation::smoothed_intervals : Representation::intervals;
    out.degenerate = false;
    out.values.resize(contour.values.size() - 1);
    for (std::size_t i = 0; i + 1 < contour.values.size(); ++i)
        out.values[i] = contour.values[i + 1] - contour.values[i];
    if (smooth) out.values = gaussian_smooth(out.values, sigma);
    return out;
}

std::vector<double> dct_basis(std::size_t n, std::size_t frequency) {
    std::vector<double> basis(n);
    const double scale = frequency == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        basis[i] = scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                                    static_cast<double>(frequency) / static_cast<double>(n));
    return basis;
}

ContourVector cosine_contour(const ContourVector& centered, std::size_t n_coef) {
    const std::size_t n = centered.values.size();
    if (n_coef < 1 || n_coef + 1 > n)
        throw DimensionError("cosine contour needs 1 <= n_coef <= " + std::to_string(n - 1));
    ContourVector out = centered;
    out.representation = Representation::cosine;
    out.degenerate = false;
    out.values.assign(n_coef, 0.0);
    for (std::size_t k = 1; k <= n_coef; ++k) {
        const auto basis = dct_basis(n, k);
        out.values[k - 1] = std::inner_product(basis.begin(), basis.end(), centered.values.begin(), 0.0);
    }
    return out;
}

ContourVector make_contour(const Phrase& phrase, Representation representation, const ContourOptions& options) {
    const ContourVector pitch = step_curve_sample(phrase, options.samples);
    switch (representation) {
        case Representation::intervals:
            return intervals(pitch, false);
        case Representation::smoothed_intervals:
            return intervals(pitch, true, options.smoothing_sigma);
        case Representation::cosine:
            return cosine_contour(standardize(pitch, Representation::centered, phrase.tonic, phrase.final_pitch()),
                                  std::min(options.cosine_coefficients, options.samples - 1));
        default:
            return standardize(pitch, representation, phrase.tonic, phrase.final_pitch());
    }
}

std::string contour_to_json_line(const ContourVector& contour) {
    nlohmann::ordered_json j;
    j["id"] = contour.id;
    j["source"] = contour.source;
    j["representation"] = to_string(contour.representation);
    j["values"] = contour.values;
    j["length_notes"] = contour.length_notes;
    j["duration_qn"] = contour.duration_qn.to_string();
    j["degenerate"] = contour.degenerate;
    return j.dump();
}

ContourVector contour_from_json_line(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
        ContourVector c;
        c.id = j.at("id").get<std::string>();
        c.source = j.value("source", "");
        c.representation = parse_representation(j.at("representation").get<std::string>());
        c.values = j.at("values").get<std::vector<double>>();
        c.length_notes = j.value("length_notes", std::size_t{0});
        c.duration_qn = Rational::parse(j.value("duration_qn", std::string("0")));
        c.degenerate = j.value("degenerate", false);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("bad contour record: ") + e.what());
    }
}

void write_contours(std::ostream& out, const std::vector<ContourVector>& contours) {
    for (const auto& c : contours) out << contour_to_json_line(c) << '\n';
}

std::vector<ContourVector> read_contours(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<ContourVector> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(contour_from_json_line(line));
        } catch (const ParseError& e) {
            throw ParseError(number, e.detail());
        }
    }
    return out;
}

}  // namespace contourlab
