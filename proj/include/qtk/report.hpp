#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtk/analysis.hpp"
#include "qtk/circuit.hpp"
#include "qtk/noise.hpp"

namespace qtk {

// Plain `key = value` file with '#' comments; keys cover NoiseProfile and
// HardwareProfile fields. Unknown keys are rejected.
struct RunProfiles {
    NoiseProfile noise;
    HardwareProfile hardware;
    bool seed_from_config = false;
};

RunProfiles parse_config_text(const std::string& text);
RunProfiles load_config(const std::string& path);

// One polyline per series over shared x values; minimal standalone SVG.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& x,
                           const std::vector<SvgSeries>& series);

std::string leak_points_to_csv(const std::vector<LeakScanPoint>& points);
std::vector<std::pair<double, double>> leak_points_from_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace qtk
