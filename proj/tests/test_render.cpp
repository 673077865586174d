#include "contourlab/render.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

using namespace contourlab;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir{CONTOURLAB_SOURCE_DIR};

Json cell(const std::string& dataset, const std::string& metric, const std::string& status, double p) {
    Json c{{"dataset", dataset}, {"representation", "pitch"}, {"metric", metric}, {"stratum", ""},
           {"seed", 1},          {"contours", 100},           {"status", status}, {"message", ""}};
    if (status == "ok") {
        c["dip"] = Json{{"dip", 0.01}, {"p_value", p}, {"n", 4}, {"replicates", 10}, {"seed", 2}};
        c["histogram"] = Json{{"edges", {0.0, 1.0, 2.0}}, {"counts", {1, 3}}};
        c["kde"] = Json{{"grid", {0.0, 1.0, 2.0}}, {"density", {0.1, 0.4, 0.2}}, {"bandwidth", 0.5}};
    } else {
        c["dip"] = nullptr;
    }
    return c;
}

Json toy_report() {
    Json r;
    r["cells"] = Json::array({cell("a", "euclidean", "ok", 0.0004), cell("a", "dtw", "ok", 0.3),
                              cell("b", "euclidean", "ok", 0.05), cell("b", "dtw", "skipped", 1.0)});
    return r;
}

// Minimal well-formedness check: balanced start/end tags and one root.
bool balanced_tags(const std::string& xml) {
    std::vector<std::string> stack;
    const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
    int roots = 0;
    for (auto it = std::sregex_iterator(xml.begin(), xml.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (m[1].length()) {
            if (stack.empty() || stack.back() != m[2].str()) return false;
            stack.pop_back();
        } else if (!m[3].length()) {
            if (stack.empty()) ++roots;
            stack.push_back(m[2].str());
        }
    }
    return stack.empty() && roots == 1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Render, Colours) {
    EXPECT_EQ(p_value_color(0.05), "#e6e6e6");
    EXPECT_EQ(p_value_color(0.7), "#e6e6e6");
    EXPECT_EQ(p_value_color(0.0004), "#b2182b");
    EXPECT_EQ(p_value_color(0.005), "#ef6548");
    EXPECT_EQ(p_value_color(0.02), "#fdae61");
}

TEST(Render, OnlySignificantCellsAreColoured) {
    const auto docs = render_report(toy_report());
    ASSERT_EQ(docs.size(), 1u);
    EXPECT_EQ(docs[0].name, "cells.svg");
    const auto& svg = docs[0].content;
    const std::regex fill(R"re(class="cell-fill" fill="(#[0-9a-f]{6})")re");
    std::size_t coloured = 0, grey = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it)
        ((*it)[1] == "#e6e6e6" ? grey : coloured)++;
    EXPECT_EQ(coloured, 1u);
    EXPECT_EQ(grey, 2u);
    EXPECT_NE(svg.find("class=\"cell empty\""), std::string::npos);
    EXPECT_EQ(svg.find("-0.00"), std::string::npos);
    EXPECT_TRUE(balanced_tags(svg));
}

TEST(Render, PureFunctionOfReport) {
    const auto a = render_report(toy_report());
    const auto b = render_report(toy_report());
    EXPECT_EQ(a[0].content, b[0].content);
}

TEST(Render, GoldenCells) {
    const auto config = load_config(source_dir / "tests/data/golden_config.json");
    const auto docs = render_report(run_experiment(config));
    for (const auto& d : docs) EXPECT_TRUE(balanced_tags(d.content)) << d.name;
    const auto golden = source_dir / "tests/data/golden/cells.svg";
    if (std::getenv("CONTOURLAB_UPDATE_GOLDEN")) {
        std::ofstream(golden, std::ios::binary) << docs[0].content;
        GTEST_SKIP() << "golden file rewritten";
    }
    ASSERT_TRUE(fs::exists(golden));
    EXPECT_EQ(docs[0].content, read_file(golden));
}

TEST(Render, WritesFiles) {
    const auto dir = fs::temp_directory_path() / "contourlab_render_test";
    fs::remove_all(dir);
    const auto paths = write_figures(toy_report(), dir);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_TRUE(fs::exists(dir / "cells.svg"));
    fs::remove_all(dir);
}
