#pragma once

#include "contourlab/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace contourlab {

struct RenderStyle {
    double cell_width = 180.0;
    double cell_height = 110.0;
    double margin = 12.0;
    double alpha = 0.05;
};

struct SvgDocument {
    std::string name;  ///< file name, e.g. "cells.svg"
    std::string content;
};

/// Fill colour of a cell with the given p-value: grey when p >= alpha.
std::string p_value_color(double p_value, double alpha = 0.05);

/// Figures are a pure function of the report. Always returns the cell grid; the
/// univariate, typology and average panels only when the report has those sections.
std::vector<SvgDocument> render_report(const Json& report, const RenderStyle& style = {});

/// Renders and writes every figure into `dir`, returning the written paths.
std::vector<std::filesystem::path> write_figures(const Json& report, const std::filesystem::path& dir,
                                                 const RenderStyle& style = {});

}  // namespace contourlab
