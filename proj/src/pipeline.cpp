#include "contourlab/pipeline.hpp"

#include "contourlab/error.hpp"
#include "contourlab/ingest.hpp"
#include "contourlab/random.hpp"
#include "contourlab/synth.hpp"
#include "contourlab/typology.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#ifndef CONTOURLAB_VERSION
#define CONTOURLAB_VERSION "0.0.0"
#endif

namespace contourlab {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// config parsing

void check_keys(const Json& object, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!object.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& item : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
}

template <typename T>
T field(const Json& object, const char* key, T fallback, std::string_view where) {
    const auto it = object.find(key);
    if (it == object.end() || it->is_null()) return fallback;
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0))
                throw ConfigError("");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw ConfigError("");
        }
        return it->get<T>();
    } catch (const std::exception&) {
        throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
    }
}

std::vector<std::string> string_list(const Json& object, const char* key, std::string_view where) {
    const auto it = object.find(key);
    if (it == object.end()) return {};
    if (!it->is_array()) throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must be a list");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string_view kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::corpus: return "corpus";
        case DatasetKind::synthetic_uniform: return "synthetic-uniform";
        case DatasetKind::synthetic_clustered: return "synthetic-clustered";
    }
    return "corpus";
}

DatasetSpec parse_dataset(const Json& j, std::size_t index) {
    const std::string where = "datasets[" + std::to_string(index) + "]";
    DatasetSpec d;
    d.name = field<std::string>(j, "name", "", where);
    if (d.name.empty()) throw ConfigError(where + " needs a name");
    const auto kind = field<std::string>(j, "type", "corpus", where);
    if (kind == "corpus") {
        check_keys(j, where, {"name", "type", "paths", "format", "unit", "segment_lambda", "per_path"});
        d.kind = DatasetKind::corpus;
        d.paths = string_list(j, "paths", where);
        if (d.paths.empty()) throw ConfigError(where + " needs at least one path");
        d.format = field<std::string>(j, "format", "kern", where);
        if (d.format != "kern" && d.format != "jsonl") throw ConfigError(where + ": format must be kern or jsonl");
        d.unit = field<std::string>(j, "unit", "phrases", where);
        if (d.unit != "phrases" && d.unit != "segments") throw ConfigError(where + ": unit must be phrases or segments");
        if (j.contains("segment_lambda")) {
            d.segment_lambda = field<double>(j, "segment_lambda", 0.0, where);
            if (!(*d.segment_lambda > 0.0)) throw ConfigError(where + ": segment_lambda must be positive");
        }
        if (j.contains("per_path")) d.per_path = field<std::size_t>(j, "per_path", 0, where);
    } else if (kind == "synthetic-uniform") {
        check_keys(j, where, {"name", "type", "fit_from", "count"});
        d.kind = DatasetKind::synthetic_uniform;
        d.fit_from = field<std::string>(j, "fit_from", "", where);
        d.count = field<std::size_t>(j, "count", d.count, where);
        if (d.count == 0) throw ConfigError(where + ": count must be positive");
    } else if (kind == "synthetic-clustered") {
        check_keys(j, where, {"name", "type", "fit_from", "pool", "keep", "k"});
        d.kind = DatasetKind::synthetic_clustered;
        d.fit_from = field<std::string>(j, "fit_from", "", where);
        d.pool = field<std::size_t>(j, "pool", d.pool, where);
        d.keep = field<std::size_t>(j, "keep", d.keep, where);
        d.k = field<std::size_t>(j, "k", d.k, where);
        if (d.k == 0 || d.keep == 0 || d.keep > d.pool) throw ConfigError(where + ": need 0 < keep <= pool and k >= 1");
    } else {
        throw ConfigError(where + ": unknown dataset type '" + kind + "'");
    }
    if (d.kind != DatasetKind::corpus && d.fit_from.empty()) throw ConfigError(where + " needs fit_from");
    return d;
}

// ---------------------------------------------------------------------------
// running

struct BuiltDataset {
    std::string name;
    DatasetKind kind = DatasetKind::corpus;
    std::vector<Phrase> phrases;
    std::vector<std::string> warnings;
    std::string error;
};

fs::path resolve(const ExperimentConfig& config, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() || config.base_dir.empty() ? p : config.base_dir / p;
}

double mean_length(const std::vector<Phrase>& phrases) {
    if (phrases.empty()) return 0.0;
    double total = 0.0;
    for (const auto& p : phrases) total += static_cast<double>(p.length());
    return total / static_cast<double>(phrases.size());
}

// One entry per corpus path: the melodies and their phrases.
struct PathData {
    std::string path;
    std::vector<Melody> melodies;
    std::vector<Phrase> phrases;
};

std::vector<PathData> load_paths(const ExperimentConfig& config, const DatasetSpec& spec) {
    std::vector<PathData> out;
    for (const auto& path : spec.paths) {
        PathData data;
        data.path = path;
        data.melodies = load_corpus(resolve(config, path), spec.format);
        for (const auto& melody : data.melodies) {
            auto phrases = extract_phrases(melody);
            data.phrases.insert(data.phrases.end(), phrases.begin(), phrases.end());
        }
        out.push_back(std::move(data));
    }
    return out;
}

std::vector<Phrase> units_of(const ExperimentConfig& config, const DatasetSpec& spec, const PathData& data,
                             double lambda) {
    if (spec.unit == "phrases") return data.phrases;
    Rng rng = substream(config.seed, "segments|" + spec.name + "|" + data.path);
    std::vector<Phrase> out;
    for (const auto& melody : data.melodies) {
        auto segments = random_segments(melody, lambda, rng);
        out.insert(out.end(), segments.begin(), segments.end());
    }
    return out;
}

std::vector<Phrase> select_units(const ExperimentConfig& config, const DatasetSpec& spec, const std::string& name,
                                 std::vector<std::vector<Phrase>> groups, std::vector<std::string>& warnings) {
    if (spec.per_path) {
        Rng rng = substream(config.seed, "sample|" + name);
        auto sample = aggregate_sample(groups, *spec.per_path, rng);
        warnings.insert(warnings.end(), sample.warnings.begin(), sample.warnings.end());
        return std::move(sample.phrases);
    }
    std::vector<Phrase> out;
    for (auto& group : groups) out.insert(out.end(), group.begin(), group.end());
    return out;
}

std::vector<BuiltDataset> build_datasets(const ExperimentConfig& config) {
    std::map<std::string, std::vector<Phrase>> fit_sources;
    std::map<std::string, std::string> fit_errors;
    std::vector<std::vector<BuiltDataset>> built(config.datasets.size());

    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        const auto& spec = config.datasets[d];
        if (spec.kind != DatasetKind::corpus) continue;
        try {
            const auto paths = load_paths(config, spec);
            std::vector<Phrase> all_phrases;
            for (const auto& p : paths) all_phrases.insert(all_phrases.end(), p.phrases.begin(), p.phrases.end());
            fit_sources[spec.name] = all_phrases;
            const double lambda = spec.segment_lambda.value_or(mean_length(all_phrases));

            if (config.variants.per_dataset && paths.size() > 1) {
                for (const auto& p : paths) {
                    BuiltDataset out;
                    out.name = spec.name + "/" + fs::path(p.path).filename().string();
                    out.phrases = select_units(config, spec, out.name, {units_of(config, spec, p, lambda)}, out.warnings);
                    built[d].push_back(std::move(out));
                }
            } else {
                BuiltDataset out;
                out.name = spec.name;
                std::vector<std::vector<Phrase>> groups;
                for (const auto& p : paths) groups.push_back(units_of(config, spec, p, lambda));
                out.phrases = select_units(config, spec, out.name, std::move(groups), out.warnings);
                built[d].push_back(std::move(out));
            }
        } catch (const Error& e) {
            fit_errors[spec.name] = e.what();
            built[d].push_back(BuiltDataset{spec.name, spec.kind, {}, {}, e.what()});
        }
    }

    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        const auto& spec = config.datasets[d];
        if (spec.kind == DatasetKind::corpus) continue;
        BuiltDataset out;
        out.name = spec.name;
        out.kind = spec.kind;
        try {
            if (fit_errors.count(spec.fit_from)) throw InputError("fit_from dataset failed: " + fit_errors[spec.fit_from]);
            const MarkovModel model = fit_markov(fit_sources.at(spec.fit_from));
            Rng rng = substream(config.seed, "dataset|" + spec.name);
            if (spec.kind == DatasetKind::synthetic_uniform) {
                out.phrases = sample_uniform(model, spec.count, rng);
            } else {
                const auto pool = sample_uniform(model, spec.pool, rng);
                ClusterOptions options;
                options.k = spec.k;
                options.pool = spec.pool;
                options.keep = spec.keep;
                options.samples = config.contour.samples;
                options.cosine_coefficients = config.contour.cosine_coefficients;
                out.phrases = make_clustered(pool, options, rng).phrases;
            }
        } catch (const Error& e) {
            out.error = e.what();
        }
        built[d].push_back(std::move(out));
    }

    std::vector<BuiltDataset> flat;
    for (auto& group : built)
        for (auto& item : group) flat.push_back(std::move(item));
    return flat;
}

std::vector<double> reduce_to_10(const ContourVector& contour) {
    const auto& v = contour.values;
    if (contour.representation == Representation::cosine)
        return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, v.size()))};
    const std::size_t stride = std::max<std::size_t>(1, v.size() / 10);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size() && out.size() < 10; i += stride) out.push_back(v[i]);
    return out;
}

std::vector<ContourVector> prepare_contours(const ExperimentConfig& config, const std::vector<Phrase>& phrases,
                                            Representation representation) {
    std::vector<ContourVector> contours;
    contours.reserve(phrases.size());
    std::set<std::vector<double>> seen;
    for (const auto& phrase : phrases) {
        ContourVector c = make_contour(phrase, representation, config.contour);
        if (config.variants.unique_only && !seen.insert(c.values).second) continue;
        if (config.variants.dim10) c.values = reduce_to_10(c);
        contours.push_back(std::move(c));
    }
    return contours;
}

Matrix to_matrix(const std::vector<ContourVector>& contours) {
    const std::size_t dim = contours.empty() ? 0 : contours.front().values.size();
    Matrix out(static_cast<Eigen::Index>(contours.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < contours.size(); ++i) {
        if (contours[i].values.size() != dim) throw DimensionError("contours of unequal length");
        for (std::size_t j = 0; j < dim; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = contours[i].values[j];
    }
    return out;
}

Json dip_json(const DipResult& r) {
    return Json{{"dip", r.dip}, {"p_value", r.p_value}, {"n", r.n}, {"replicates", r.replicates}, {"seed", r.seed}};
}

Json histogram_json(const Histogram& h) { return Json{{"edges", h.edges}, {"counts", h.counts}}; }

Json density_json(const Density& d) {
    return Json{{"grid", d.grid}, {"density", d.density}, {"bandwidth", d.bandwidth}, {"degenerate", d.degenerate}};
}

Json cell_json(const CellResult& c) {
    Json j;
    j["dataset"] = c.dataset;
    j["representation"] = c.representation;
    j["metric"] = c.metric;
    j["stratum"] = c.stratum;
    j["seed"] = c.seed;
    j["contours"] = c.contours;
    j["status"] = to_string(c.status);
    j["message"] = c.message;
    j["dip"] = c.dip ? dip_json(*c.dip) : Json(nullptr);
    j["histogram"] = histogram_json(c.histogram);
    j["kde"] = density_json(c.density);
    return j;
}

constexpr std::size_t kde_points = 128;

void fill_distribution(CellResult& cell, std::span<const double> values, std::size_t bins) {
    cell.histogram = histogram(values, bins);
    cell.density = kde(values, std::nullopt, kde_points);
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::vector<CellResult> run_dataset(const ExperimentConfig& config, const BuiltDataset& dataset) {
    std::vector<CellResult> cells;
    for (const auto representation : config.representations) {
        const std::string repr_name(to_string(representation));
        const bool wants_umap = std::find(config.metrics.begin(), config.metrics.end(), Metric::umap) != config.metrics.end();

        std::string pair_error = dataset.error;
        std::vector<ContourVector> contours;
        if (pair_error.empty()) {
            try {
                contours = prepare_contours(config, dataset.phrases, representation);
            } catch (const Error& e) {
                pair_error = e.what();
            }
        }

        // One embedding per (dataset, representation), shared by all strata.
        std::optional<Matrix> embedding;
        std::string umap_error;
        if (pair_error.empty() && wants_umap) {
            try {
                UmapParams params = config.umap;
                params.seed = derive_seed(config.seed, "umap|" + dataset.name + "|" + repr_name);
                embedding = umap_fit(to_matrix(contours), params).embedding;
            } catch (const Error& e) {
                umap_error = e.what();
            }
        }

        // Strata: the whole set, or one per note count.
        std::vector<std::pair<std::string, std::vector<std::size_t>>> strata;
        if (config.variants.per_length && pair_error.empty()) {
            std::map<std::size_t, std::vector<std::size_t>> by_length;
            for (std::size_t i = 0; i < contours.size(); ++i) by_length[contours[i].length_notes].push_back(i);
            for (auto& [length, members] : by_length)
                strata.emplace_back("length=" + std::to_string(length), std::move(members));
        } else {
            std::vector<std::size_t> all(contours.size());
            std::iota(all.begin(), all.end(), 0);
            strata.emplace_back("", std::move(all));
        }

        for (const auto metric : config.metrics) {
            const std::string metric_name(to_string(metric));
            for (const auto& [stratum, members] : strata) {
                CellResult cell;
                cell.dataset = dataset.name;
                cell.representation = repr_name;
                cell.metric = metric_name;
                cell.stratum = stratum;
                cell.seed = cell_seed(config.seed, dataset.name, repr_name, metric_name, stratum);
                cell.contours = members.size();

                if (!pair_error.empty()) {
                    cell.status = CellStatus::error;
                    cell.message = pair_error;
                } else if (metric == Metric::dtw && representation == Representation::cosine) {
                    cell.status = CellStatus::not_applicable;
                    cell.message = "dtw is not defined for cosine contours";
                } else if (metric == Metric::umap && !umap_error.empty()) {
                    cell.status = CellStatus::error;
                    cell.message = umap_error;
                } else if (config.variants.per_length && members.size() < config.min_stratum) {
                    cell.status = CellStatus::skipped;
                    cell.message = "stratum has fewer than " + std::to_string(config.min_stratum) + " contours";
                } else {
                    try {
                        std::vector<ContourVector> subset;
                        subset.reserve(members.size());
                        for (auto i : members) subset.push_back(contours[i]);
                        std::optional<Matrix> rows;
                        if (metric == Metric::umap) {
                            rows.emplace(static_cast<Eigen::Index>(members.size()), embedding->cols());
                            for (std::size_t r = 0; r < members.size(); ++r)
                                rows->row(static_cast<Eigen::Index>(r)) = embedding->row(static_cast<Eigen::Index>(members[r]));
                        }
                        Rng rng(cell.seed);
                        const auto sample = pairwise_sample(subset, metric, config.m, rng, rows ? &*rows : nullptr);
                        cell.dip = dip_test(sample.values, config.replicates, rng);
                        fill_distribution(cell, sample.values, config.histogram_bins);
                    } catch (const Error& e) {
                        cell.status = CellStatus::error;
                        cell.message = e.what();
                        cell.dip.reset();
                    }
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

const BuiltDataset* find_dataset(const std::vector<BuiltDataset>& datasets, const std::string& name) {
    for (const auto& d : datasets)
        if (d.name == name) return &d;
    return nullptr;
}

Json distribution_json(const TypeDistribution& dist) {
    Json counts = Json::object();
    for (std::size_t i = 0; i < dist.labels.size(); ++i) counts[dist.labels[i]] = dist.counts[i];
    return Json{{"total", dist.total}, {"entropy", dist.entropy}, {"counts", counts}};
}

Json run_typology(const ExperimentConfig& config, const std::vector<BuiltDataset>& datasets) {
    const auto& spec = *config.typology;
    const auto grid = epsilon_grid(config.epsilon_start, config.epsilon_stop, config.epsilon_step);
    Json out{{"epsilons", spec.epsilons}, {"grid", grid}, {"datasets", Json::array()}};
    for (const auto& name : spec.datasets) {
        Json entry{{"name", name}};
        try {
            const BuiltDataset* dataset = find_dataset(datasets, name);
            if (!dataset) throw InputError("no dataset named '" + name + "'");
            if (!dataset->error.empty()) throw InputError(dataset->error);
            std::vector<ContourVector> contours;
            for (const auto& phrase : dataset->phrases)
                contours.push_back(make_contour(phrase, Representation::pitch, config.contour));
            Json huron = Json::array();
            Json adams = Json::array();
            for (double eps : spec.epsilons) {
                Json h = distribution_json(type_distribution(contours, eps));
                h["epsilon"] = eps;
                huron.push_back(std::move(h));
                Json a = distribution_json(type_distribution(dataset->phrases, eps));
                a["epsilon"] = eps;
                adams.push_back(std::move(a));
            }
            const auto sweep = max_entropy_epsilon(contours, grid);
            entry["status"] = "ok";
            entry["huron"] = std::move(huron);
            entry["adams"] = std::move(adams);
            entry["max_entropy"] = Json{{"epsilon", sweep.epsilon}, {"entropy", sweep.entropy}};
        } catch (const Error& e) {
            entry["status"] = "error";
            entry["message"] = e.what();
        }
        out["datasets"].push_back(std::move(entry));
    }
    return out;
}

Json run_averages(const ExperimentConfig& config, const std::vector<BuiltDataset>& datasets) {
    const auto& spec = *config.averages;
    Json out{{"representation", to_string(spec.representation)}, {"baseline", spec.baseline}, {"series", Json::array()}};
    std::vector<std::string> names = spec.datasets;
    if (!spec.baseline.empty()) names.push_back(spec.baseline);
    for (const auto& name : names) {
        Json entry{{"name", name}, {"baseline", name == spec.baseline}};
        try {
            const BuiltDataset* dataset = find_dataset(datasets, name);
            if (!dataset) throw InputError("no dataset named '" + name + "'");
            if (!dataset->error.empty()) throw InputError(dataset->error);
            std::vector<ContourVector> contours;
            for (const auto& phrase : dataset->phrases)
                contours.push_back(make_contour(phrase, spec.representation, config.contour));
            const auto avg = average_contour(contours);
            entry["status"] = "ok";
            entry["count"] = avg.count;
            entry["mean"] = avg.mean;
            entry["lower"] = avg.lower;
            entry["upper"] = avg.upper;
        } catch (const Error& e) {
            entry["status"] = "error";
            entry["message"] = e.what();
        }
        out["series"].push_back(std::move(entry));
    }
    return out;
}

Json run_univariate(const ExperimentConfig& config) {
    Json out = Json::array();
    for (const auto& spec : config.univariate) {
        Json entry{{"name", spec.name}};
        try {
            const auto values = read_values_csv(resolve(config, spec.path));
            Rng rng = substream(config.seed, "univariate|" + spec.name);
            const auto dip = dip_test(values, config.replicates, rng);
            entry["status"] = "ok";
            entry["dip"] = dip_json(dip);
            entry["histogram"] = histogram_json(histogram(values, config.histogram_bins));
            entry["kde"] = density_json(kde(values, std::nullopt, kde_points));
        } catch (const Error& e) {
            entry["status"] = "error";
            entry["message"] = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir) {
    check_keys(j, "config",
               {"seed", "m", "replicates", "datasets", "representations", "metrics", "variants", "umap", "contour",
                "min_stratum", "histogram_bins", "epsilon_grid", "typology", "averages", "univariate"});
    ExperimentConfig c;
    c.base_dir = base_dir;
    c.seed = field<std::uint64_t>(j, "seed", 0, "config");
    c.m = field<std::size_t>(j, "m", c.m, "config");
    c.replicates = field<std::size_t>(j, "replicates", c.replicates, "config");
    c.min_stratum = field<std::size_t>(j, "min_stratum", c.min_stratum, "config");
    c.histogram_bins = field<std::size_t>(j, "histogram_bins", c.histogram_bins, "config");
    if (c.m < 1 || c.replicates < 1 || c.histogram_bins < 1) throw ConfigError("m, replicates and histogram_bins must be positive");

    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty())
        throw ConfigError("config needs a non-empty datasets list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["datasets"].size(); ++i) {
        auto d = parse_dataset(j["datasets"][i], i);
        if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
        c.datasets.push_back(std::move(d));
    }
    for (const auto& d : c.datasets) {
        if (d.kind == DatasetKind::corpus) continue;
        const auto source = std::find_if(c.datasets.begin(), c.datasets.end(),
                                         [&](const DatasetSpec& s) { return s.name == d.fit_from; });
        if (source == c.datasets.end() || source->kind != DatasetKind::corpus)
            throw ConfigError("dataset '" + d.name + "': fit_from must name a corpus dataset");
    }

    try {
        if (j.contains("representations")) {
            c.representations.clear();
            for (const auto& r : string_list(j, "representations", "config")) c.representations.push_back(parse_representation(r));
        }
        if (j.contains("metrics")) {
            c.metrics.clear();
            for (const auto& m : string_list(j, "metrics", "config")) c.metrics.push_back(parse_metric(m));
        }
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    if (c.representations.empty() || c.metrics.empty()) throw ConfigError("representations and metrics must be non-empty");

    if (j.contains("variants")) {
        const auto& v = j["variants"];
        check_keys(v, "variants", {"unique_only", "dim10", "per_length", "per_dataset"});
        c.variants.unique_only = field<bool>(v, "unique_only", false, "variants");
        c.variants.dim10 = field<bool>(v, "dim10", false, "variants");
        c.variants.per_length = field<bool>(v, "per_length", false, "variants");
        c.variants.per_dataset = field<bool>(v, "per_dataset", false, "variants");
    }
    if (j.contains("umap")) {
        const auto& u = j["umap"];
        check_keys(u, "umap", {"n_neighbors", "min_dist", "spread", "n_epochs", "dim", "negative_sample_rate"});
        c.umap.n_neighbors = field<std::size_t>(u, "n_neighbors", c.umap.n_neighbors, "umap");
        c.umap.min_dist = field<double>(u, "min_dist", c.umap.min_dist, "umap");
        c.umap.spread = field<double>(u, "spread", c.umap.spread, "umap");
        c.umap.n_epochs = field<std::size_t>(u, "n_epochs", c.umap.n_epochs, "umap");
        c.umap.target_dim = field<std::size_t>(u, "dim", c.umap.target_dim, "umap");
        c.umap.negative_sample_rate = field<std::size_t>(u, "negative_sample_rate", c.umap.negative_sample_rate, "umap");
        if (c.umap.n_neighbors < 2 || c.umap.target_dim < 1) throw ConfigError("umap needs n_neighbors >= 2 and dim >= 1");
    }
    if (j.contains("contour")) {
        const auto& o = j["contour"];
        check_keys(o, "contour", {"samples", "cosine_coefficients", "smoothing_sigma"});
        c.contour.samples = field<std::size_t>(o, "samples", c.contour.samples, "contour");
        c.contour.cosine_coefficients = field<std::size_t>(o, "cosine_coefficients", c.contour.samples - 1, "contour");
        c.contour.smoothing_sigma = field<double>(o, "smoothing_sigma", c.contour.smoothing_sigma, "contour");
        if (c.contour.samples < 2 || c.contour.cosine_coefficients >= c.contour.samples)
            throw ConfigError("contour needs samples >= 2 and cosine_coefficients < samples");
    }
    if (j.contains("epsilon_grid")) {
        const auto& g = j["epsilon_grid"];
        check_keys(g, "epsilon_grid", {"start", "stop", "step"});
        c.epsilon_start = field<double>(g, "start", c.epsilon_start, "epsilon_grid");
        c.epsilon_stop = field<double>(g, "stop", c.epsilon_stop, "epsilon_grid");
        c.epsilon_step = field<double>(g, "step", c.epsilon_step, "epsilon_grid");
        if (!(c.epsilon_step > 0.0) || c.epsilon_stop < c.epsilon_start) throw ConfigError("invalid epsilon_grid");
    }
    if (j.contains("typology")) {
        const auto& t = j["typology"];
        check_keys(t, "typology", {"datasets", "epsilons"});
        TypologySpec spec;
        spec.datasets = string_list(t, "datasets", "typology");
        if (t.contains("epsilons")) spec.epsilons = t["epsilons"].get<std::vector<double>>();
        c.typology = std::move(spec);
    }
    if (j.contains("averages")) {
        const auto& a = j["averages"];
        check_keys(a, "averages", {"datasets", "baseline", "representation"});
        AverageSpec spec;
        spec.datasets = string_list(a, "datasets", "averages");
        spec.baseline = field<std::string>(a, "baseline", "", "averages");
        try {
            spec.representation = parse_representation(field<std::string>(a, "representation", "centered", "averages"));
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
        c.averages = std::move(spec);
    }
    if (j.contains("univariate")) {
        if (!j["univariate"].is_array()) throw ConfigError("univariate must be a list");
        for (const auto& u : j["univariate"]) {
            check_keys(u, "univariate", {"name", "path"});
            c.univariate.push_back({field<std::string>(u, "name", "", "univariate"), field<std::string>(u, "path", "", "univariate")});
        }
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j, path.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["seed"] = c.seed;
    j["m"] = c.m;
    j["replicates"] = c.replicates;
    Json datasets = Json::array();
    for (const auto& d : c.datasets) {
        Json e{{"name", d.name}, {"type", kind_name(d.kind)}};
        if (d.kind == DatasetKind::corpus) {
            e["paths"] = d.paths;
            e["format"] = d.format;
            e["unit"] = d.unit;
            if (d.segment_lambda) e["segment_lambda"] = *d.segment_lambda;
            if (d.per_path) e["per_path"] = *d.per_path;
        } else {
            e["fit_from"] = d.fit_from;
            if (d.kind == DatasetKind::synthetic_uniform) {
                e["count"] = d.count;
            } else {
                e["pool"] = d.pool;
                e["keep"] = d.keep;
                e["k"] = d.k;
            }
        }
        datasets.push_back(std::move(e));
    }
    j["datasets"] = std::move(datasets);
    Json reprs = Json::array();
    for (auto r : c.representations) reprs.push_back(to_string(r));
    j["representations"] = std::move(reprs);
    Json metrics = Json::array();
    for (auto m : c.metrics) metrics.push_back(to_string(m));
    j["metrics"] = std::move(metrics);
    j["variants"] = Json{{"unique_only", c.variants.unique_only},
                         {"dim10", c.variants.dim10},
                         {"per_length", c.variants.per_length},
                         {"per_dataset", c.variants.per_dataset}};
    j["umap"] = Json{{"n_neighbors", c.umap.n_neighbors},       {"min_dist", c.umap.min_dist},
                     {"spread", c.umap.spread},                 {"n_epochs", c.umap.n_epochs},
                     {"dim", c.umap.target_dim},                {"negative_sample_rate", c.umap.negative_sample_rate}};
    j["contour"] = Json{{"samples", c.contour.samples},
                        {"cosine_coefficients", c.contour.cosine_coefficients},
                        {"smoothing_sigma", c.contour.smoothing_sigma}};
    j["min_stratum"] = c.min_stratum;
    j["histogram_bins"] = c.histogram_bins;
    j["epsilon_grid"] = Json{{"start", c.epsilon_start}, {"stop", c.epsilon_stop}, {"step", c.epsilon_step}};
    if (c.typology) j["typology"] = Json{{"datasets", c.typology->datasets}, {"epsilons", c.typology->epsilons}};
    if (c.averages)
        j["averages"] = Json{{"datasets", c.averages->datasets},
                             {"baseline", c.averages->baseline},
                             {"representation", to_string(c.averages->representation)}};
    if (!c.univariate.empty()) {
        Json u = Json::array();
        for (const auto& s : c.univariate) u.push_back(Json{{"name", s.name}, {"path", s.path}});
        j["univariate"] = std::move(u);
    }
    return j;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) throw InputError("histogram needs at least one bin");
    Histogram h;
    h.counts.assign(bins, 0);
    if (values.empty()) {
        h.edges.assign(bins + 1, 0.0);
        return h;
    }
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges[bins] = hi;
    for (double v : values) {
        auto bin = static_cast<std::size_t>((v - lo) / width);
        h.counts[std::min(bin, bins - 1)]++;
    }
    return h;
}

std::string_view to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::skipped: return "skipped";
        case CellStatus::not_applicable: return "not-applicable";
        case CellStatus::error: return "error";
    }
    return "error";
}

std::uint64_t cell_seed(std::uint64_t seed, const std::string& dataset, const std::string& representation,
                        const std::string& metric, const std::string& stratum) {
    return derive_seed(seed, "cell|" + dataset + "|" + representation + "|" + metric + "|" + stratum);
}

Json run_experiment(const ExperimentConfig& config) {
    for (const auto& d : config.datasets)
        for (const auto& p : d.paths)
            if (!fs::exists(resolve(config, p))) throw ConfigError("dataset '" + d.name + "': path does not exist: " + p);
    for (const auto& u : config.univariate)
        if (!fs::exists(resolve(config, u.path))) throw ConfigError("univariate '" + u.name + "': path does not exist: " + u.path);

    const auto clock_start = std::chrono::steady_clock::now();
    const std::string started = timestamp();

    const auto datasets = build_datasets(config);
    Json report;
    report["software"] = Json{{"name", "contour-lab"}, {"version", CONTOURLAB_VERSION}};
    report["config"] = config_to_json(config);
    report["metadata"] = Json{{"alpha", 0.05},
                              {"umap_fit", "per dataset and representation"},
                              {"unique_contours", "deduplicated on the sampled representation vector"},
                              {"smoothing_sigma", config.contour.smoothing_sigma},
                              {"cell_seed", "derived from config seed and cell key"}};

    Json dataset_info = Json::array();
    for (const auto& d : datasets) {
        Json e{{"name", d.name}, {"size", d.phrases.size()}, {"warnings", d.warnings}};
        e["error"] = d.error.empty() ? Json(nullptr) : Json(d.error);
        dataset_info.push_back(std::move(e));
    }
    report["datasets"] = std::move(dataset_info);

    Json cells = Json::array();
    for (const auto& d : datasets)
        for (const auto& cell : run_dataset(config, d)) cells.push_back(cell_json(cell));
    report["cells"] = std::move(cells);

    if (config.typology) report["typology"] = run_typology(config, datasets);
    if (config.averages) report["averages"] = run_averages(config, datasets);
    if (!config.univariate.empty()) report["univariate"] = run_univariate(config);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    report["runtime"] = Json{{"started", started}, {"finished", timestamp()}, {"seconds", seconds}};
    return report;
}

bool report_has_errors(const Json& report) {
    const auto failed = [](const Json& list) {
        return std::any_of(list.begin(), list.end(), [](const Json& e) { return e.value("status", "") == "error"; });
    };
    if (report.contains("cells") && failed(report["cells"])) return true;
    if (report.contains("typology") && failed(report["typology"]["datasets"])) return true;
    if (report.contains("averages") && failed(report["averages"]["series"])) return true;
    if (report.contains("univariate") && failed(report["univariate"])) return true;
    return false;
}

Json strip_timestamps(Json report) {
    report.erase("runtime");
    return report;
}

std::vector<double> read_values_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t number = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const bool header_allowed = std::exchange(first_row, false);
        const auto comma = line.rfind(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
            values.push_back(v);
        } catch (const std::exception&) {
            if (header_allowed) continue;
            throw ParseError(number, "not a number: '" + cell + "'");
        }
    }
    return values;
}

}  // namespace contourlab
