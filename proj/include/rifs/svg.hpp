#pragma once

#include <span>
#include <string>
#include <vector>

namespace rifs {

/// Depth-by-position raster of binned mass on a log colour scale.
std::string heatmap_svg(const std::vector<std::vector<double>>& heatmap);

/// Polyline plot of (x, y) points with axis labels.
std::string curve_svg(std::span<const double> x, std::span<const double> y, const std::string& x_label,
                      const std::string& y_label);

} // namespace rifs
