#include "contourlab/error.hpp"
#include "contourlab/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

using namespace contourlab;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir{CONTOURLAB_SOURCE_DIR};

Json small_config() {
    return Json::parse(R"({
      "seed": 3, "m": 400, "replicates": 40,
      "datasets": [
        {"name": "folk", "type": "corpus", "paths": ["data/fixtures/kern"]},
        {"name": "chant", "type": "corpus", "paths": ["data/fixtures/chant"], "format": "jsonl"}
      ],
      "representations": ["pitch", "centered"],
      "metrics": ["euclidean"]
    })");
}

std::map<std::string, Json> cells_by_key(const Json& report) {
    std::map<std::string, Json> out;
    for (const auto& c : report["cells"])
        out[c["dataset"].get<std::string>() + "|" + c["representation"].get<std::string>() + "|" +
            c["metric"].get<std::string>() + "|" + c["stratum"].get<std::string>()] = c;
    return out;
}

}  // namespace

TEST(Config, RoundTrip) {
    const auto config = parse_config(small_config(), source_dir);
    EXPECT_EQ(config.datasets.size(), 2u);
    EXPECT_EQ(config.m, 400u);
    const auto again = parse_config(config_to_json(config), source_dir);
    EXPECT_EQ(config_to_json(again), config_to_json(config));
}

TEST(Config, Errors) {
    auto bad = small_config();
    bad["metrics"] = {"manhattan"};
    EXPECT_THROW(parse_config(bad, source_dir), ConfigError);
    bad = small_config();
    bad["colour"] = "red";
    EXPECT_THROW(parse_config(bad, source_dir), ConfigError);
    bad = small_config();
    bad["datasets"][1]["name"] = "folk";
    EXPECT_THROW(parse_config(bad, source_dir), ConfigError);
    bad = small_config();
    bad["m"] = -3;
    EXPECT_THROW(parse_config(bad, source_dir), ConfigError);
    bad = small_config();
    bad["datasets"].push_back(Json{{"name", "u"}, {"type", "synthetic-uniform"}, {"fit_from", "nowhere"}});
    EXPECT_THROW(parse_config(bad, source_dir), ConfigError);
    bad = small_config();
    bad["datasets"][0]["paths"] = {"no/such/dir"};
    EXPECT_THROW(run_experiment(parse_config(bad, source_dir)), ConfigError);
    EXPECT_THROW(load_config(source_dir / "tests/data/missing.json"), ConfigError);
}

TEST(Pipeline, GridAndDeterminism) {
    const auto config = parse_config(small_config(), source_dir);
    const auto first = run_experiment(config);
    ASSERT_EQ(first["cells"].size(), 4u);
    for (const auto& cell : first["cells"]) {
        EXPECT_EQ(cell["status"], "ok");
        EXPECT_FALSE(cell["dip"].is_null());
        const double p = cell["dip"]["p_value"];
        EXPECT_GT(p, 0.0);
        EXPECT_LE(p, 1.0);
        std::size_t total = 0;
        for (const auto& c : cell["histogram"]["counts"]) total += c.get<std::size_t>();
        EXPECT_EQ(total, 400u);
    }
    EXPECT_TRUE(first.contains("runtime"));
    const auto second = run_experiment(config);
    EXPECT_EQ(strip_timestamps(first).dump(), strip_timestamps(second).dump());
    EXPECT_FALSE(report_has_errors(first));
}

TEST(Pipeline, CellsIndependentOfOtherDatasets) {
    const auto full = cells_by_key(run_experiment(parse_config(small_config(), source_dir)));
    auto reduced_json = small_config();
    reduced_json["datasets"].erase(0);
    const auto reduced = cells_by_key(run_experiment(parse_config(reduced_json, source_dir)));
    ASSERT_EQ(reduced.size(), 2u);
    for (const auto& [key, cell] : reduced) {
        ASSERT_TRUE(full.count(key)) << key;
        EXPECT_EQ(full.at(key).dump(), cell.dump()) << key;
    }
}

TEST(Pipeline, CellSeedDependsOnKey) {
    EXPECT_EQ(cell_seed(1, "a", "pitch", "dtw", ""), cell_seed(1, "a", "pitch", "dtw", ""));
    EXPECT_NE(cell_seed(1, "a", "pitch", "dtw", ""), cell_seed(1, "b", "pitch", "dtw", ""));
    EXPECT_NE(cell_seed(1, "a", "pitch", "dtw", ""), cell_seed(2, "a", "pitch", "dtw", ""));
}

TEST(Pipeline, NotApplicableAndErrorCells) {
    auto j = small_config();
    j["datasets"] = Json::parse(R"([
        {"name": "folk", "type": "corpus", "paths": ["data/fixtures/kern"]},
        {"name": "uniform", "type": "synthetic-uniform", "fit_from": "folk", "count": 80}])");
    j["representations"] = {"cosine", "tonicized"};
    j["metrics"] = {"dtw"};
    const auto cells = cells_by_key(run_experiment(parse_config(j, source_dir)));
    EXPECT_EQ(cells.at("folk|cosine|dtw|")["status"], "not-applicable");
    EXPECT_TRUE(cells.at("folk|cosine|dtw|")["dip"].is_null());
    EXPECT_EQ(cells.at("folk|tonicized|dtw|")["status"], "ok");
    EXPECT_EQ(cells.at("uniform|tonicized|dtw|")["status"], "error");
    EXPECT_FALSE(cells.at("uniform|tonicized|dtw|")["message"].get<std::string>().empty());
}

TEST(Pipeline, PerLengthSkipsSmallStrata) {
    auto j = small_config();
    j["datasets"].erase(1);
    j["representations"] = {"pitch"};
    j["variants"] = Json{{"per_length", true}};
    j["min_stratum"] = 30;
    const auto report = run_experiment(parse_config(j, source_dir));
    std::size_t ok = 0, skipped = 0, contours = 0;
    for (const auto& c : report["cells"]) {
        EXPECT_EQ(c["stratum"].get<std::string>().rfind("length=", 0), 0u);
        contours += c["contours"].get<std::size_t>();
        if (c["status"] == "skipped") {
            ++skipped;
            EXPECT_LT(c["contours"].get<std::size_t>(), 30u);
        } else if (c["status"] == "ok") {
            ++ok;
            EXPECT_GE(c["contours"].get<std::size_t>(), 30u);
        }
    }
    EXPECT_GT(skipped, 0u);
    EXPECT_EQ(contours, report["datasets"][0]["size"].get<std::size_t>());
}

TEST(Pipeline, UniqueOnlyAndDim10) {
    auto j = small_config();
    j["variants"] = Json{{"unique_only", true}, {"dim10", true}};
    j["representations"] = {"cosine"};
    const auto report = run_experiment(parse_config(j, source_dir));
    for (const auto& c : report["cells"]) {
        EXPECT_EQ(c["status"], "ok");
        EXPECT_LE(c["contours"].get<std::size_t>(), report["datasets"][0]["size"].get<std::size_t>());
    }
}

TEST(Histogram, CountsAndEdges) {
    const std::vector<double> v{0.0, 0.5, 1.0, 1.0, 2.0};
    const auto h = histogram(v, 4);
    ASSERT_EQ(h.edges.size(), 5u);
    EXPECT_DOUBLE_EQ(h.edges.front(), 0.0);
    EXPECT_DOUBLE_EQ(h.edges.back(), 2.0);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 2, 1}));
    const auto flat = histogram(std::vector<double>(3, 1.0), 2);
    EXPECT_EQ(flat.counts[0] + flat.counts[1], 3u);
}

TEST(ValuesCsv, HeaderAndComments) {
    const auto path = fs::temp_directory_path() / "contourlab_values.csv";
    {
        std::ofstream out(path);
        out << "# comment\nid,tempo\na,1.5\nb,2\n";
    }
    EXPECT_EQ(read_values_csv(path), (std::vector<double>{1.5, 2.0}));
    {
        std::ofstream out(path);
        out << "1\n2\nx\n";
    }
    EXPECT_THROW(read_values_csv(path), ParseError);
    fs::remove(path);
}
