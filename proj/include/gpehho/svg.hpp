#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gpehho {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), both > 0
};

/// Self-contained log-log plot: one polyline per series (class "series"),
/// decade grid, legend, and for every requested order a dashed slope
/// triangle whose hypotenuse is a line of class "slope". Throws render
/// errors on non-positive or non-finite data.
std::string emit_svg_loglog(const std::vector<SvgSeries>& series, const std::string& x_label,
                            const std::string& y_label, const std::vector<double>& reference_slopes,
                            const std::string& title = "");

}  // namespace gpehho
