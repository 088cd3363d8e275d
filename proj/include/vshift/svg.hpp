#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vshift {

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y), drawn in order
};

/// Minimal line chart: axes with ticks, one polyline per series, legend in
/// the top-right corner. Deterministic output for identical input.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

}  // namespace vshift
