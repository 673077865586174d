#include "contourlab/contour.hpp"
#include "contourlab/embed.hpp"
#include "contourlab/error.hpp"
#include "contourlab/ingest.hpp"
#include "contourlab/kernels.hpp"
#include "contourlab/metrics.hpp"
#include "contourlab/pipeline.hpp"
#include "contourlab/render.hpp"
#include "contourlab/stats.hpp"
#include "contourlab/synth.hpp"
#include "contourlab/typology.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace contourlab;
namespace fs = std::filesystem;

namespace {

constexpr int exit_config = 1;
constexpr int exit_cell = 2;

std::ofstream open_out(const std::string& path) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

void emit_json(const Json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

Json dip_json(const DipResult& r) {
    return Json{{"dip", r.dip}, {"p_value", r.p_value}, {"n", r.n}, {"replicates", r.replicates}, {"seed", r.seed}};
}

bool is_phrase_file(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) return Json::parse(line).contains("pitches");
    return false;
}

// Accepts a contour file, or a phrase file converted with `representation`.
std::vector<ContourVector> read_contour_input(const std::string& path, Representation representation) {
    if (!is_phrase_file(path)) return read_contours(path);
    std::vector<ContourVector> out;
    for (const auto& phrase : read_phrases(path)) out.push_back(make_contour(phrase, representation));
    return out;
}

Matrix to_matrix(const std::vector<ContourVector>& contours) {
    if (contours.empty()) throw InputError("no contours in input");
    const auto dim = contours.front().values.size();
    Matrix m(static_cast<Eigen::Index>(contours.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < contours.size(); ++i) {
        if (contours[i].values.size() != dim) throw DimensionError("contours of unequal length");
        for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = contours[i].values[j];
    }
    return m;
}

// Rows of "id,x0,x1,..." with a header line.
Matrix read_embedding_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) throw DimensionError("ragged embedding CSV");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("empty embedding CSV");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

std::vector<double> parse_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':')
        throw ConfigError("grid must look like start:stop:step");
    return epsilon_grid(start, stop, step);
}

void apply_thread_cap() {
    if (const char* env = std::getenv("CONTOURLAB_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) kernels::set_max_threads(threads);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contour-lab: clusterability analysis of melodic phrase contours"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CONTOURLAB_VERSION));

    std::string in, out, format = "kern", phrases_out, segments_out, repr = "centered", metric = "euclidean",
                typology = "huron", json_out, grid = "0:4:0.1", config_path, report_path, embedding_path, labels_out;
    std::optional<double> lambda;
    std::uint64_t seed = 0;
    std::size_t n = default_samples, count = 25000, k = 5, keep = 1000, m = default_pair_count, dim = 10,
                replicates = default_replicates, neighbors = 15, epochs = 200, pca = 0;
    std::optional<std::size_t> pool;
    double epsilon = 0.0, min_dist = 0.1;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> m_override, replicates_override;
    std::vector<std::string> repr_override, metric_override;

    auto* ingest = app.add_subcommand("ingest", "Parse a corpus and write phrases (and optional random segments)");
    ingest->add_option("--in", in, "Corpus directory or file")->required();
    ingest->add_option("--format", format, "kern or jsonl")->check(CLI::IsMember({"kern", "jsonl"}));
    ingest->add_option("--phrases", phrases_out, "Phrase JSONL output")->required();
    ingest->add_option("--segments", segments_out, "Random-segment JSONL output");
    ingest->add_option("--lambda", lambda, "Mean segment length (default: mean phrase length)");
    ingest->add_option("--seed", seed);

    auto* contours = app.add_subcommand("contours", "Turn phrases into contour vectors");
    contours->add_option("--in", in)->required();
    contours->add_option("--repr", repr);
    contours->add_option("--n", n, "Samples per contour");
    contours->add_option("--out", out)->required();

    auto* synth = app.add_subcommand("synth", "Sample uniform synthetic contours from a fitted Markov model");
    synth->add_option("--fit", in, "Phrase JSONL to fit")->required();
    synth->add_option("--count", count);
    synth->add_option("--seed", seed);
    synth->add_option("--out", out)->required();

    auto* clustered = app.add_subcommand("synth-clustered", "Subsample a clustered dataset from uniform contours");
    clustered->add_option("--in", in)->required();
    clustered->add_option("--k", k);
    clustered->add_option("--keep", keep);
    clustered->add_option("--pool", pool, "Pool size (default: min(25000, input size))");
    clustered->add_option("--seed", seed);
    clustered->add_option("--out", out)->required();
    clustered->add_option("--labels", labels_out, "CSV of planted cluster labels");

    auto* distances = app.add_subcommand("distances", "Sample pairwise distances");
    distances->add_option("--in", in)->required();
    distances->add_option("--metric", metric)->check(CLI::IsMember({"euclidean", "dtw", "umap"}));
    distances->add_option("--m", m);
    distances->add_option("--seed", seed);
    distances->add_option("--embedding", embedding_path, "Embedding CSV for the umap metric (fitted if absent)");
    distances->add_option("--out", out)->required();

    auto* embed = app.add_subcommand("embed", "Fit a UMAP embedding");
    embed->add_option("--in", in)->required();
    embed->add_option("--dim", dim);
    embed->add_option("--n-neighbors", neighbors);
    embed->add_option("--min-dist", min_dist);
    embed->add_option("--epochs", epochs);
    embed->add_option("--seed", seed);
    embed->add_option("--out", out)->required();

    auto* diptest = app.add_subcommand("diptest", "Dip test on a univariate CSV");
    diptest->add_option("--in", in)->required();
    diptest->add_option("--replicates", replicates);
    diptest->add_option("--seed", seed);
    diptest->add_option("--json", json_out);

    auto* distdip = app.add_subcommand("distdip", "Dist-dip test on contours");
    distdip->add_option("--in", in)->required();
    distdip->add_option("--metric", metric)->check(CLI::IsMember({"euclidean", "dtw", "umap"}));
    distdip->add_option("--m", m);
    distdip->add_option("--replicates", replicates);
    distdip->add_option("--dim", dim, "UMAP dimension for the umap metric");
    distdip->add_option("--seed", seed);
    distdip->add_option("--json", json_out);

    auto* typ = app.add_subcommand("typology", "Type distribution at a tolerance");
    typ->add_option("--in", in)->required();
    typ->add_option("--typology", typology)->check(CLI::IsMember({"huron", "adams"}));
    typ->add_option("--epsilon", epsilon);
    typ->add_option("--json", json_out);

    auto* sweep = app.add_subcommand("epsilon-sweep", "Entropy of the type distribution over a tolerance grid");
    sweep->add_option("--in", in)->required();
    sweep->add_option("--grid", grid);
    sweep->add_option("--typology", typology)->check(CLI::IsMember({"huron", "adams"}));
    sweep->add_option("--json", json_out);

    auto* km = app.add_subcommand("kmeans", "k-means clustering of contours");
    km->add_option("--in", in)->required();
    km->add_option("--k", k);
    km->add_option("--pca", pca, "Project onto this many principal components first");
    km->add_option("--seed", seed);
    km->add_option("--json", json_out);

    auto* average = app.add_subcommand("average", "Average contour with a 95% band");
    average->add_option("--in", in)->required();
    average->add_option("--out", out);

    auto* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out)->required();
    run->add_option("--seed", seed_override);
    run->add_option("--m", m_override);
    run->add_option("--replicates", replicates_override);
    run->add_option("--representations", repr_override)->delimiter(',');
    run->add_option("--metrics", metric_override)->delimiter(',');

    auto* render = app.add_subcommand("render", "Render SVG figures from a report");
    render->add_option("--report", report_path)->required();
    render->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; usage errors are configuration errors.
        return app.exit(e) == 0 ? 0 : 1;
    }
    apply_thread_cap();

    try {
        if (ingest->parsed()) {
            const auto melodies = load_corpus(in, format);
            std::vector<Phrase> phrases;
            for (const auto& melody : melodies)
                for (auto& p : extract_phrases(melody)) phrases.push_back(std::move(p));
            auto pout = open_out(phrases_out);
            write_phrases(pout, phrases);
            std::cerr << melodies.size() << " melodies, " << phrases.size() << " phrases\n";
            if (!segments_out.empty()) {
                double total = 0.0;
                for (const auto& p : phrases) total += static_cast<double>(p.length());
                const double lam = lambda.value_or(phrases.empty() ? 1.0 : total / static_cast<double>(phrases.size()));
                Rng rng(seed);
                std::vector<Phrase> segments;
                for (const auto& melody : melodies)
                    for (auto& s : random_segments(melody, lam, rng)) segments.push_back(std::move(s));
                auto sout = open_out(segments_out);
                write_phrases(sout, segments);
                std::cerr << segments.size() << " segments (lambda " << lam << ")\n";
            }
        } else if (contours->parsed()) {
            ContourOptions options;
            options.samples = n;
            options.cosine_coefficients = n - 1;
            const auto representation = parse_representation(repr);
            std::vector<ContourVector> result;
            for (const auto& phrase : read_phrases(in)) result.push_back(make_contour(phrase, representation, options));
            auto o = open_out(out);
            write_contours(o, result);
        } else if (synth->parsed()) {
            const auto model = fit_markov(read_phrases(in));
            Rng rng(seed);
            auto o = open_out(out);
            write_phrases(o, sample_uniform(model, count, rng));
        } else if (clustered->parsed()) {
            const auto uniform = read_phrases(in);
            ClusterOptions options;
            options.k = k;
            options.keep = keep;
            options.pool = pool.value_or(std::min<std::size_t>(25000, uniform.size()));
            Rng rng(seed);
            const auto sample = make_clustered(uniform, options, rng);
            auto o = open_out(out);
            write_phrases(o, sample.phrases);
            if (!labels_out.empty()) {
                auto l = open_out(labels_out);
                l << "id,label\n";
                for (std::size_t i = 0; i < sample.phrases.size(); ++i) l << sample.phrases[i].id << ',' << sample.labels[i] << '\n';
            }
        } else if (distances->parsed() || distdip->parsed()) {
            const auto data = read_contour_input(in, Representation::centered);
            const auto chosen = parse_metric(metric);
            std::optional<Matrix> embedding;
            if (chosen == Metric::umap) {
                if (!embedding_path.empty()) {
                    embedding = read_embedding_csv(embedding_path);
                    if (static_cast<std::size_t>(embedding->rows()) != data.size())
                        throw DimensionError("embedding has a different number of rows than the contours");
                } else {
                    UmapParams params;
                    params.target_dim = dim;
                    params.seed = derive_seed(seed, "umap");
                    embedding = umap_fit(to_matrix(data), params).embedding;
                }
            }
            Rng rng(seed);
            if (distances->parsed()) {
                const auto sample = pairwise_sample(data, chosen, m, rng, embedding ? &*embedding : nullptr);
                auto o = open_out(out);
                o << "# metric=" << metric << " m=" << m << " seed=" << seed << " pair_seed=" << sample.pair_seed
                  << " n=" << data.size() << '\n';
                o << "distance\n";
                o.precision(17);
                for (double v : sample.values) o << v << '\n';
            } else {
                const auto result = dist_dip_test(data, chosen, m, replicates, rng, embedding ? &*embedding : nullptr);
                Json j = dip_json(result);
                j["metric"] = metric;
                j["m"] = m;
                emit_json(j, json_out);
            }
        } else if (embed->parsed()) {
            const auto data = read_contour_input(in, Representation::centered);
            UmapParams params;
            params.target_dim = dim;
            params.n_neighbors = neighbors;
            params.min_dist = min_dist;
            params.n_epochs = epochs;
            params.seed = seed;
            const auto model = umap_fit(to_matrix(data), params);
            auto o = open_out(out);
            o.precision(17);
            o << "id";
            for (std::size_t d = 0; d < dim; ++d) o << ",x" << d;
            o << '\n';
            for (Eigen::Index i = 0; i < model.embedding.rows(); ++i) {
                o << data[static_cast<std::size_t>(i)].id;
                for (Eigen::Index d = 0; d < model.embedding.cols(); ++d) o << ',' << model.embedding(i, d);
                o << '\n';
            }
        } else if (diptest->parsed()) {
            const auto values = read_values_csv(in);
            Rng rng(seed);
            emit_json(dip_json(dip_test(values, replicates, rng)), json_out);
        } else if (typ->parsed() || sweep->parsed()) {
            const bool adams = parse_typology(typology) == Typology::adams;
            std::vector<Phrase> phrases;
            std::vector<ContourVector> data;
            if (adams) {
                if (!is_phrase_file(in)) throw InputError("the adams typology needs phrase input (notes, not contours)");
                phrases = read_phrases(in);
            } else {
                data = read_contour_input(in, Representation::pitch);
            }
            if (typ->parsed()) {
                const auto dist = adams ? type_distribution(phrases, epsilon) : type_distribution(data, epsilon);
                Json counts = Json::object();
                for (std::size_t i = 0; i < dist.labels.size(); ++i) counts[dist.labels[i]] = dist.counts[i];
                Json labels = Json::array();
                if (adams)
                    for (const auto& p : phrases) labels.push_back(Json{{"id", p.id}, {"type", adams_type(p, epsilon)}});
                else
                    for (const auto& c : data) labels.push_back(Json{{"id", c.id}, {"type", to_string(huron_type(c, epsilon))}});
                emit_json(Json{{"typology", typology}, {"epsilon", epsilon}, {"total", dist.total},
                               {"entropy", dist.entropy}, {"counts", counts}, {"labels", labels}},
                          json_out);
            } else {
                const auto values = parse_grid(grid);
                const auto result = adams ? max_entropy_epsilon(phrases, values) : max_entropy_epsilon(data, values);
                emit_json(Json{{"typology", typology}, {"epsilon", result.epsilon}, {"grid", result.grid},
                               {"entropy", result.entropy}},
                          json_out);
            }
        } else if (km->parsed()) {
            const auto data = read_contour_input(in, Representation::centered);
            Matrix points = to_matrix(data);
            if (pca > 0) points = pca_transform(pca_fit(points, pca), points);
            const auto result = kmeans(points, k, seed);
            Json centroids = Json::array();
            for (Eigen::Index c = 0; c < result.centroids.rows(); ++c) {
                std::vector<double> row(result.centroids.row(c).begin(), result.centroids.row(c).end());
                centroids.push_back(row);
            }
            emit_json(Json{{"k", result.k}, {"seed", result.seed}, {"inertia", result.inertia},
                           {"iterations", result.iterations}, {"centroids", centroids}, {"labels", result.labels}},
                      json_out);
        } else if (average->parsed()) {
            const auto avg = average_contour(read_contour_input(in, Representation::centered));
            emit_json(Json{{"count", avg.count}, {"mean", avg.mean}, {"lower", avg.lower}, {"upper", avg.upper}}, out);
        } else if (run->parsed()) {
            std::ifstream cin(config_path);
            if (!cin) throw ConfigError("cannot open config " + config_path);
            Json j;
            try {
                j = Json::parse(cin);
            } catch (const Json::parse_error& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            if (seed_override) j["seed"] = *seed_override;
            if (m_override) j["m"] = *m_override;
            if (replicates_override) j["replicates"] = *replicates_override;
            if (!repr_override.empty()) j["representations"] = repr_override;
            if (!metric_override.empty()) j["metrics"] = metric_override;
            const auto config = parse_config(j, fs::path(config_path).parent_path());
            const auto report = run_experiment(config);
            emit_json(report, out);
            if (report_has_errors(report)) {
                std::cerr << "one or more cells failed; see the report\n";
                return exit_cell;
            }
        } else if (render->parsed()) {
            std::ifstream rin(report_path);
            if (!rin) throw InputError("cannot open report " + report_path);
            for (const auto& path : write_figures(Json::parse(rin), out)) std::cerr << path.string() << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
