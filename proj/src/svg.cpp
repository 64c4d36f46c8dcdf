#include "qrm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qrm/errors.hpp"

namespace qrm {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 40.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double to_unit(double v) const {
        if (log) {
            return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        }
        return (v - lo) / (hi - lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int e0 = static_cast<int>(std::floor(std::log10(lo)));
            const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
            for (int e = e0; e <= e1; ++e) {
                const double v = std::pow(10.0, e);
                if (v >= lo * 0.999 && v <= hi * 1.001) {
                    out.push_back(v);
                }
            }
            if (out.size() < 2) {
                out = {lo, hi};
            }
        } else {
            const double span = hi - lo;
            const double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
            double mult = 1.0;
            if (span / step > 8.0) {
                mult = 2.0;
            }
            if (span / (step * mult) > 8.0) {
                mult = 5.0 / 2.0 * mult;
            }
            const double s = step * mult;
            for (double v = std::ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
                out.push_back(v);
            }
        }
        return out;
    }
};

} // namespace

void SvgPlot::write(const std::filesystem::path& path) const {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double xv = s.x[i], yv = s.y[i];
            if (!std::isfinite(xv) || !std::isfinite(yv)) {
                continue;
            }
            if (log_x && xv <= 0.0) {
                continue;
            }
            if (log_y && yv <= 0.0) {
                continue;
            }
            x_lo = std::min(x_lo, xv);
            x_hi = std::max(x_hi, xv);
            y_lo = std::min(y_lo, yv);
            y_hi = std::max(y_hi, yv);
        }
    }
    if (!(x_lo < x_hi)) {
        x_hi = x_lo + 1.0;
    }
    if (!(y_lo < y_hi)) {
        y_hi = y_lo + 1.0;
    }
    if (!log_y) {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    } else {
        y_lo /= 1.5;
        y_hi *= 1.5;
    }
    if (log_x) {
        x_lo /= 1.2;
        x_hi *= 1.2;
    }

    const Axis ax{x_lo, x_hi, log_x};
    const Axis ay{y_lo, y_hi, log_y};
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.to_unit(v) * plot_w; };
    auto py = [&](double v) { return kTop + (1.0 - ay.to_unit(v)) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    for (double tv : ax.ticks()) {
        const double x = px(tv);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(tv) << "</text>\n";
    }
    for (double tv : ay.ticks()) {
        const double y = py(tv);
        out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(tv)
            << "</text>\n";
    }
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label
        << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (!s.points_only) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (log_x && s.x[i] <= 0.0) continue;
                if (log_y && s.y[i] <= 0.0) continue;
                out << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
            }
            out << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (log_x && s.x[i] <= 0.0) continue;
                if (log_y && s.y[i] <= 0.0) continue;
                out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
                    << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
            }
        }
        const double ly = kTop + 16.0 + 16.0 * static_cast<double>(k);
        out << "<rect x=\"" << kLeft + plot_w - 150 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << kLeft + plot_w - 132 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot write SVG file '" + path.string() + "'");
    }
    file << out.str();
}

} // namespace qrm
