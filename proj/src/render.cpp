#include "contourlab/render.hpp"

#include "contourlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace contourlab {

namespace {

constexpr const char* grey = "#e6e6e6";
constexpr const char* baseline_grey = "#9a9a9a";
constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v, int precision = 2) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", precision, v);
    std::string out(buffer);
    if (out.find_first_not_of("-0.") == std::string::npos) return precision > 0 ? "0." + std::string(precision, '0') : "0";
    return out;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string p_label(double p) { return p < 0.001 ? "p<0.001" : "p=" + num(p, 3); }

class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {}

    Svg& raw(const std::string& text) {
        body_ << text << '\n';
        return *this;
    }
    Svg& rect(double x, double y, double w, double h, const std::string& attrs) {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
              << "\" " << attrs << "/>\n";
        return *this;
    }
    Svg& text(double x, double y, std::string_view content, const std::string& attrs = {}) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\"" << (attrs.empty() ? "" : " " + attrs) << ">"
              << escape(content) << "</text>\n";
        return *this;
    }
    Svg& polyline(const std::vector<std::pair<double, double>>& points, const std::string& attrs) {
        body_ << "<polyline points=\"";
        for (std::size_t i = 0; i < points.size(); ++i)
            body_ << (i ? " " : "") << num(points[i].first) << "," << num(points[i].second);
        body_ << "\" fill=\"none\" " << attrs << "/>\n";
        return *this;
    }
    Svg& line(double x1, double y1, double x2, double y2, const std::string& attrs) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
              << "\" " << attrs << "/>\n";
        return *this;
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width_) << "\" height=\""
            << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\">\n"
            << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
               "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#b0b0b0\" "
               "stroke-width=\"2\"/></pattern></defs>\n"
            << "<style>text{font-family:sans-serif;font-size:10px}</style>\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_) << "\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

// Histogram (as density) plus KDE curve inside the box (x, y, w, h).
void distribution_panel(Svg& svg, const Json& histogram, const Json& kde, double x, double y, double w, double h) {
    const auto edges = histogram.at("edges").get<std::vector<double>>();
    const auto counts = histogram.at("counts").get<std::vector<double>>();
    const auto grid = kde.at("grid").get<std::vector<double>>();
    const auto density = kde.at("density").get<std::vector<double>>();
    if (edges.size() < 2 || counts.empty()) return;

    double total = 0.0;
    for (double c : counts) total += c;
    double lo = edges.front();
    double hi = edges.back();
    if (!grid.empty()) {
        lo = std::min(lo, grid.front());
        hi = std::max(hi, grid.back());
    }
    std::vector<double> heights(counts.size(), 0.0);
    double top = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double width = edges[i + 1] - edges[i];
        heights[i] = total > 0.0 && width > 0.0 ? counts[i] / (total * width) : 0.0;
        top = std::max(top, heights[i]);
    }
    for (double d : density) top = std::max(top, d);
    if (top <= 0.0 || hi <= lo) return;

    const auto sx = [&](double v) { return x + (v - lo) / (hi - lo) * w; };
    const auto sy = [&](double v) { return y + h - v / top * h; };
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (heights[i] <= 0.0) continue;
        svg.rect(sx(edges[i]), sy(heights[i]), sx(edges[i + 1]) - sx(edges[i]), y + h - sy(heights[i]),
                 "fill=\"#000000\" fill-opacity=\"0.18\"");
    }
    std::vector<std::pair<double, double>> points;
    points.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size() && i < density.size(); ++i) points.emplace_back(sx(grid[i]), sy(density[i]));
    if (!points.empty()) svg.polyline(points, "stroke=\"#000000\" stroke-width=\"1\"");
}

std::string row_label(const Json& cell) {
    std::string label = cell.at("dataset").get<std::string>() + " / " + cell.at("representation").get<std::string>();
    const auto stratum = cell.value("stratum", "");
    if (!stratum.empty()) label += " / " + stratum;
    return label;
}

SvgDocument render_cells(const Json& report, const RenderStyle& style) {
    // Rows: (dataset, representation, stratum) in report order. Columns: metrics in config order.
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    for (const auto& cell : report.at("cells")) {
        const auto row = row_label(cell);
        const auto column = cell.at("metric").get<std::string>();
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
        if (std::find(columns.begin(), columns.end(), column) == columns.end()) columns.push_back(column);
    }
    const double label_width = 200.0;
    const double header = 24.0;
    const double width = label_width + static_cast<double>(columns.size()) * (style.cell_width + style.margin) + style.margin;
    const double height = header + static_cast<double>(rows.size()) * (style.cell_height + style.margin) + style.margin;
    Svg svg(width, height);

    for (std::size_t c = 0; c < columns.size(); ++c)
        svg.text(label_width + static_cast<double>(c) * (style.cell_width + style.margin) + style.cell_width / 2, 16,
                 columns[c], "text-anchor=\"middle\" font-weight=\"bold\"");
    for (std::size_t r = 0; r < rows.size(); ++r)
        svg.text(style.margin, header + static_cast<double>(r) * (style.cell_height + style.margin) + style.cell_height / 2,
                 rows[r]);

    for (const auto& cell : report.at("cells")) {
        const auto r = static_cast<double>(std::find(rows.begin(), rows.end(), row_label(cell)) - rows.begin());
        const auto c = static_cast<double>(
            std::find(columns.begin(), columns.end(), cell.at("metric").get<std::string>()) - columns.begin());
        const double x = label_width + c * (style.cell_width + style.margin);
        const double y = header + r * (style.cell_height + style.margin);
        const auto status = cell.at("status").get<std::string>();
        const bool has_result = status == "ok" && cell.contains("dip") && !cell.at("dip").is_null();

        if (!has_result) {
            svg.raw("<g class=\"cell empty\" data-status=\"" + escape(status) + "\">");
            svg.rect(x, y, style.cell_width, style.cell_height, "fill=\"url(#hatch)\" stroke=\"#999999\"");
            svg.text(x + 6, y + 14, status);
            svg.raw("</g>");
            continue;
        }
        const double p = cell.at("dip").at("p_value").get<double>();
        const double dip = cell.at("dip").at("dip").get<double>();
        const bool significant = p < style.alpha;
        svg.raw(std::string("<g class=\"cell ") + (significant ? "significant" : "not-significant") + "\">");
        svg.rect(x, y, style.cell_width, style.cell_height,
                 "class=\"cell-fill\" fill=\"" + p_value_color(p, style.alpha) + "\" stroke=\"#999999\"");
        distribution_panel(svg, cell.at("histogram"), cell.at("kde"), x + 6, y + 20, style.cell_width - 12,
                           style.cell_height - 26);
        svg.text(x + 6, y + 14, p_label(p) + " dip=" + num(dip, 4));
        svg.raw("</g>");
    }
    return {"cells.svg", svg.str()};
}

SvgDocument render_univariate(const Json& report, const RenderStyle& style) {
    const auto& panels = report.at("univariate");
    const double width = static_cast<double>(std::max<std::size_t>(panels.size(), 1)) * (style.cell_width + style.margin) + style.margin;
    const double height = style.cell_height + 2 * style.margin + 16;
    Svg svg(width, height);
    double x = style.margin;
    for (const auto& panel : panels) {
        const double y = style.margin + 16;
        svg.text(x, style.margin + 8, panel.at("name").get<std::string>(), "font-weight=\"bold\"");
        if (panel.value("status", "") != "ok") {
            svg.rect(x, y, style.cell_width, style.cell_height, "fill=\"url(#hatch)\" stroke=\"#999999\"");
        } else {
            const double p = panel.at("dip").at("p_value").get<double>();
            svg.rect(x, y, style.cell_width, style.cell_height,
                     "class=\"cell-fill\" fill=\"" + p_value_color(p, style.alpha) + "\" stroke=\"#999999\"");
            distribution_panel(svg, panel.at("histogram"), panel.at("kde"), x + 6, y + 20, style.cell_width - 12,
                               style.cell_height - 26);
            svg.text(x + 6, y + 14, p_label(p));
        }
        x += style.cell_width + style.margin;
    }
    return {"univariate.svg", svg.str()};
}

SvgDocument render_typology(const Json& report, const RenderStyle& style) {
    const auto& section = report.at("typology");
    const auto epsilons = section.at("epsilons").get<std::vector<double>>();
    const double panel_w = 420.0;
    const double panel_h = 160.0;
    const double label_h = 90.0;
    const double left = 50.0;
    const auto& datasets = section.at("datasets");
    const double height = static_cast<double>(std::max<std::size_t>(datasets.size(), 1)) * (panel_h + label_h + style.margin) + style.margin;
    Svg svg(left + panel_w + style.margin + 90, height);

    double y0 = style.margin;
    for (const auto& entry : datasets) {
        svg.text(left, y0 + 10, entry.at("name").get<std::string>() + " (Huron)", "font-weight=\"bold\"");
        if (entry.value("status", "") != "ok") {
            svg.rect(left, y0 + 16, panel_w, panel_h, "fill=\"url(#hatch)\" stroke=\"#999999\"");
            y0 += panel_h + label_h + style.margin;
            continue;
        }
        const auto& huron = entry.at("huron");
        std::vector<std::string> labels;
        for (const auto& item : huron.at(0).at("counts").items()) labels.push_back(item.key());
        const double group_w = panel_w / static_cast<double>(labels.size());
        const double bar_w = (group_w - 4) / static_cast<double>(std::max<std::size_t>(epsilons.size(), 1));
        const double base = y0 + 16 + panel_h;
        svg.line(left, base, left + panel_w, base, "stroke=\"#000000\" stroke-width=\"0.5\"");
        for (std::size_t e = 0; e < huron.size(); ++e) {
            const double total = huron[e].at("total").get<double>();
            for (std::size_t l = 0; l < labels.size(); ++l) {
                const double count = huron[e].at("counts").at(labels[l]).get<double>();
                const double freq = total > 0.0 ? count / total : 0.0;
                const double bx = left + static_cast<double>(l) * group_w + 2 + static_cast<double>(e) * bar_w;
                svg.rect(bx, base - freq * panel_h, bar_w, freq * panel_h,
                         std::string("fill=\"") + palette[e % std::size(palette)] + "\"");
            }
        }
        for (std::size_t l = 0; l < labels.size(); ++l) {
            const double lx = left + (static_cast<double>(l) + 0.5) * group_w;
            svg.text(lx, base + 8, labels[l],
                     "text-anchor=\"end\" font-size=\"8\" transform=\"rotate(-45 " + num(lx) + " " + num(base + 8) + ")\"");
        }
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            const double ly = y0 + 24 + static_cast<double>(e) * 12;
            svg.rect(left + panel_w + 10, ly - 8, 8, 8, std::string("fill=\"") + palette[e % std::size(palette)] + "\"");
            svg.text(left + panel_w + 22, ly, "eps=" + num(epsilons[e], 1));
        }
        svg.text(left + panel_w + 10, y0 + 24 + static_cast<double>(epsilons.size()) * 12 + 4,
                 "max H at " + num(entry.at("max_entropy").at("epsilon").get<double>(), 1));
        y0 += panel_h + label_h + style.margin;
    }
    return {"typology.svg", svg.str()};
}

SvgDocument render_averages(const Json& report, const RenderStyle&) {
    const auto& series = report.at("averages").at("series");
    const double w = 360.0;
    const double h = 200.0;
    const double pad = 30.0;
    Svg svg(w + 2 * pad + 120, h + 2 * pad);

    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    std::size_t length = 0;
    for (const auto& s : series) {
        if (s.value("status", "") != "ok") continue;
        for (const auto& key : {"lower", "upper"})
            for (double v : s.at(key).get<std::vector<double>>()) {
                lo = first ? v : std::min(lo, v);
                hi = first ? v : std::max(hi, v);
                first = false;
            }
        length = std::max(length, s.at("mean").size());
    }
    if (hi <= lo) hi = lo + 1.0;
    const auto sx = [&](std::size_t i) {
        return pad + (length > 1 ? static_cast<double>(i) / static_cast<double>(length - 1) : 0.0) * w;
    };
    const auto sy = [&](double v) { return pad + h - (v - lo) / (hi - lo) * h; };
    svg.rect(pad, pad, w, h, "fill=\"none\" stroke=\"#999999\"");
    svg.text(pad, pad - 8, report.at("averages").at("representation").get<std::string>() + " average contours",
             "font-weight=\"bold\"");

    std::size_t colour = 0;
    double legend_y = pad + 10;
    for (const auto& s : series) {
        const auto name = s.at("name").get<std::string>();
        const bool baseline = s.value("baseline", false);
        const std::string stroke = baseline ? baseline_grey : palette[colour++ % std::size(palette)];
        if (s.value("status", "") == "ok") {
            for (const auto& key : {"mean", "lower", "upper"}) {
                const auto values = s.at(key).get<std::vector<double>>();
                std::vector<std::pair<double, double>> points;
                for (std::size_t i = 0; i < values.size(); ++i) points.emplace_back(sx(i), sy(values[i]));
                const bool is_mean = std::string_view(key) == "mean";
                svg.polyline(points, "stroke=\"" + stroke + "\" stroke-width=\"" + (is_mean ? "1.5" : "0.5") + "\"" +
                                         (is_mean ? "" : " stroke-dasharray=\"2,2\""));
            }
        }
        svg.line(pad + w + 10, legend_y - 3, pad + w + 24, legend_y - 3, "stroke=\"" + stroke + "\" stroke-width=\"2\"");
        svg.text(pad + w + 28, legend_y, name);
        legend_y += 14;
    }
    svg.text(pad - 4, sy(hi) + 4, num(hi, 1), "text-anchor=\"end\"");
    svg.text(pad - 4, sy(lo), num(lo, 1), "text-anchor=\"end\"");
    return {"averages.svg", svg.str()};
}

}  // namespace

std::string p_value_color(double p_value, double alpha) {
    if (!(p_value < alpha)) return grey;
    if (p_value < 0.001) return "#b2182b";
    if (p_value < 0.01) return "#ef6548";
    return "#fdae61";
}

std::vector<SvgDocument> render_report(const Json& report, const RenderStyle& style) {
    if (!report.contains("cells") || !report.at("cells").is_array()) throw InputError("report has no cells");
    std::vector<SvgDocument> out;
    out.push_back(render_cells(report, style));
    if (report.contains("univariate")) out.push_back(render_univariate(report, style));
    if (report.contains("typology")) out.push_back(render_typology(report, style));
    if (report.contains("averages")) out.push_back(render_averages(report, style));
    return out;
}

std::vector<std::filesystem::path> write_figures(const Json& report, const std::filesystem::path& dir,
                                                 const RenderStyle& style) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& doc : render_report(report, style)) {
        const auto path = dir / doc.name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write " + path.string());
        out << doc.content;
        written.push_back(path);
    }
    return written;
}

}  // namespace contourlab
