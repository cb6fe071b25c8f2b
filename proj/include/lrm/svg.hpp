#pragma once

#include <string>
#include <vector>

#include "lrm/matrix.hpp"

namespace lrm {

// Self-contained SVG plots with the plotted numbers embedded as comments.
// A timestamp comment is included unless deterministic = true.

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool points_only = false;
};

struct PlotMarkers {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#d62728";
    std::string shape = "circle";  // circle | triangle
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log2_x = false;
    bool deterministic = false;
    std::vector<PlotSeries> series;
    std::vector<PlotMarkers> markers;
};

void write_line_plot(const std::string& path, const LinePlot& plot);

void write_heatmap(const std::string& path, const Matrix& values, const std::string& title,
                   bool deterministic);

}  // namespace lrm
