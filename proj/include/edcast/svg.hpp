#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edcast::svg {

struct Line {
    std::string label;
    std::size_t offset = 0;  ///< x position of values[0]
    std::vector<double> values;
    std::string color = "#1f77b4";
};

struct Band {
    std::size_t offset = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::string color = "#1f77b4";
    double opacity = 0.2;
};

struct Chart {
    std::string title;
    std::vector<Band> bands;  ///< drawn first, in order
    std::vector<Line> lines;
    int width = 960;
    int height = 360;
};

/// Renders a plain SVG line/band chart with a y-axis range covering all data.
[[nodiscard]] std::string render(const Chart& chart);

}  // namespace edcast::svg
