// Self-contained static SVG line plots; decorative companions to the CSVs.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qrm {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points_only = false;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<SvgSeries> series;

    void write(const std::filesystem::path& path) const;
};

} // namespace qrm
