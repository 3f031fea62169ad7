#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace polyfuse_cli {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

void write_svg(const std::string& path, const std::vector<SvgLayer>& layers) {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x, max_x = -min_x, max_y = -min_x;
    for (const SvgLayer& layer : layers) {
        for (const auto& [x, y] : layer.xy) {
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
    }
    if (!(min_x <= max_x)) throw std::runtime_error("svg: no coordinates to plot");

    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    const double scale = 1000.0 / std::max(span_x, span_y);
    const double margin = 40.0;
    const double width = span_x * scale + 2 * margin;
    const double height = span_y * scale + 2 * margin;

    // SVG y grows downward; flip about the data's top edge.
    const auto px = [&](double x) { return margin + (x - min_x) * scale; };
    const auto py = [&](double y) { return margin + (max_y - y) * scale; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg: cannot open '" + path + "' for writing");

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "  <text x=\"" << num(margin) << "\" y=\"20\" font-size=\"14\">extent "
        << num(span_x) << " m x " << num(span_y) << " m</text>\n";

    double legend_y = 40.0;
    for (const SvgLayer& layer : layers) {
        if (layer.xy.empty()) continue;
        std::ostringstream d;
        if (layer.as_points) {
            for (const auto& [x, y] : layer.xy) {
                d << 'M' << num(px(x)) << ' ' << num(py(y)) << "h0.01";
            }
        } else {
            for (std::size_t i = 0; i < layer.xy.size(); ++i) {
                d << (i == 0 ? 'M' : 'L') << num(px(layer.xy[i].first)) << ' '
                  << num(py(layer.xy[i].second));
            }
        }
        out << "  <path fill=\"none\" stroke=\"" << layer.color << "\" stroke-width=\""
            << (layer.as_points ? "3" : "1.5") << "\"";
        if (layer.as_points) out << " stroke-linecap=\"round\" opacity=\"0.5\"";
        if (layer.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " d=\"" << d.str() << "\"/>\n";

        out << "  <rect x=\"" << num(width - 190) << "\" y=\"" << num(legend_y - 10)
            << "\" width=\"12\" height=\"12\" fill=\"" << layer.color << "\"/>\n";
        out << "  <text x=\"" << num(width - 172) << "\" y=\"" << num(legend_y)
            << "\" font-size=\"13\">" << layer.label << "</text>\n";
        legend_y += 18.0;
    }
    out << "</svg>\n";
}

}  // namespace polyfuse_cli
