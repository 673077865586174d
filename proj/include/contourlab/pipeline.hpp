#pragma once

#include "contourlab/contour.hpp"
#include "contourlab/embed.hpp"
#include "contourlab/metrics.hpp"
#include "contourlab/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace contourlab {

using Json = nlohmann::ordered_json;

enum class DatasetKind { corpus, synthetic_uniform, synthetic_clustered };

struct DatasetSpec {
    std::string name;
    DatasetKind kind = DatasetKind::corpus;
    // corpus; paths are kept as written and resolved against the config directory at run time
    std::vector<std::string> paths;
    std::string format = "kern";
    std::string unit = "phrases";  ///< "phrases" or "segments"
    std::optional<double> segment_lambda;  ///< defaults to the corpus mean phrase length
    std::optional<std::size_t> per_path;  ///< balanced sample of this many per path
    // synthetic
    std::string fit_from;  ///< name of a corpus dataset whose phrases fit the Markov model
    std::size_t count = 1000;
    std::size_t pool = 25000;
    std::size_t keep = 1000;
    std::size_t k = 5;
};

struct Variants {
    bool unique_only = false;
    bool dim10 = false;
    bool per_length = false;
    bool per_dataset = false;  ///< split multi-path corpora into one dataset per path
};

struct UnivariateSpec {
    std::string name;
    std::string path;
};

struct TypologySpec {
    std::vector<std::string> datasets;
    std::vector<double> epsilons{0.0, 0.5, 1.0, 2.0, 4.0, 12.0};
};

struct AverageSpec {
    std::vector<std::string> datasets;
    std::string baseline;  ///< drawn in grey
    Representation representation = Representation::centered;
};

struct ExperimentConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<Representation> representations{Representation::pitch};
    std::vector<Metric> metrics{Metric::euclidean};
    std::size_t m = default_pair_count;
    std::size_t replicates = default_replicates;
    std::uint64_t seed = 0;
    Variants variants;
    UmapParams umap{.target_dim = 10};
    ContourOptions contour;
    std::size_t min_stratum = 50;
    std::size_t histogram_bins = 40;
    double epsilon_start = 0.0;
    double epsilon_stop = 4.0;
    double epsilon_step = 0.1;
    std::optional<TypologySpec> typology;
    std::optional<AverageSpec> averages;
    std::vector<UnivariateSpec> univariate;
    std::filesystem::path base_dir;
};

/// Parses a config object; relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const Json& json, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& config);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> values, std::size_t bins);

enum class CellStatus { ok, skipped, not_applicable, error };

std::string_view to_string(CellStatus status);

struct CellResult {
    std::string dataset;
    std::string representation;
    std::string metric;
    std::string stratum;  ///< empty, or "length=L" under the per_length variant
    std::uint64_t seed = 0;
    std::size_t contours = 0;
    CellStatus status = CellStatus::ok;
    std::string message;
    std::optional<DipResult> dip;
    Histogram histogram;
    Density density;
};

/// Seed of a cell, derived from its key so cells do not depend on each other's position.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& dataset, const std::string& representation,
                        const std::string& metric, const std::string& stratum);

/// Runs every cell; cell failures are recorded, never thrown. Configuration problems throw ConfigError.
Json run_experiment(const ExperimentConfig& config);

/// True when any cell of a report failed.
bool report_has_errors(const Json& report);

/// Reads one number per row (last column of a CSV); a non-numeric first row is a header
/// and lines starting with '#' are comments.
std::vector<double> read_values_csv(const std::filesystem::path& path);

/// Removes the runtime stamps so two reports can be compared.
Json strip_timestamps(Json report);

}  // namespace contourlab
