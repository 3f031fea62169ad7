#pragma once

#include <string>
#include <utility>
#include <vector>

namespace polyfuse_cli {

struct SvgLayer {
    std::string label;
    std::string color;
    bool dashed = false;
    bool as_points = false;
    std::vector<std::pair<double, double>> xy;  // planar meters
};

/// Writes an equal-aspect SVG plot of the layers, axes in meters, one path
/// element per layer plus a legend.
void write_svg(const std::string& path, const std::vector<SvgLayer>& layers);

}  // namespace polyfuse_cli
