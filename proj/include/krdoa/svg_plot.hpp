#pragma once

#include <string>
#include <vector>

namespace krdoa {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  ///< decade-tick logarithmic y axis
};

/// Write a self-contained SVG line plot with axes, tick labels and a legend.
/// Throws std::runtime_error when no series or no finite points are given.
void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

}  // namespace krdoa
