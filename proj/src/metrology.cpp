#include "qrm/metrology.hpp"

#include <cmath>

namespace qrm {

namespace {

void check_same_grid(const Trajectory& a, const Trajectory& b) {
    if (a.times.size() != b.times.size()) {
        throw DimensionMismatch("chi_g: trajectories use different grids");
    }
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (a.times[i] != b.times[i]) {
            throw DimensionMismatch("chi_g: trajectories use different grids");
        }
    }
}

} // namespace

std::vector<double> chi_g(const Trajectory& minus, const Trajectory& zero,
                          const Trajectory& plus, double delta_g) {
    if (!(delta_g > 0.0)) {
        throw InvalidParameter("chi_g: delta_g must be positive");
    }
    check_same_grid(minus, zero);
    check_same_grid(zero, plus);
    std::vector<double> out(zero.size());
    const double inv = 1.0 / (2.0 * delta_g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (plus.moments[i].ex - minus.moments[i].ex) * inv;
    }
    return out;
}

FgSeries inverted_variance(const std::vector<double>& times, const std::vector<double>& chi,
                           const std::vector<double>& var_x) {
    if (times.size() != chi.size() || times.size() != var_x.size()) {
        throw DimensionMismatch("inverted_variance: series lengths differ");
    }
    FgSeries series;
    series.times = times;
    series.chi = chi;
    series.var_x = var_x;
    series.fg.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(var_x[i] > 0.0)) {
            throw NonpositiveVariance("inverted_variance: Var(X) <= 0 at t = " +
                                      std::to_string(times[i]));
        }
        series.fg[i] = chi[i] * chi[i] / var_x[i];
    }
    return series;
}

MaxResult max_inverted_variance(const FgSeries& series) {
    const std::size_t n = series.fg.size();
    if (n == 0) {
        throw InvalidParameter("max_inverted_variance: empty series");
    }
    std::size_t idx = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (series.fg[i] > series.fg[idx]) {
            idx = i;
        }
    }
    if (idx >= static_cast<std::size_t>(0.95 * static_cast<double>(n - 1))) {
        throw PeakAtBoundary("max_inverted_variance: peak at sample " + std::to_string(idx) +
                             " of " + std::to_string(n) + "; horizon too short");
    }
    MaxResult result;
    result.t_star = series.times[idx];
    result.fg_max = series.fg[idx];
    if (idx > 0 && idx + 1 < n) {
        const double y0 = series.fg[idx - 1];
        const double y1 = series.fg[idx];
        const double y2 = series.fg[idx + 1];
        const double curv = y0 - 2.0 * y1 + y2;
        if (curv < 0.0) {
            const double shift = 0.5 * (y0 - y2) / curv;
            const double dt = series.times[idx + 1] - series.times[idx];
            const double refined = y1 - 0.25 * (y0 - y2) * shift;
            if (refined >= y1) {
                result.t_star = series.times[idx] + shift * dt;
                result.fg_max = refined;
                result.refined = true;
            }
        }
    }
    return result;
}

double qfi(const ModelParams& params, double t, double var_p0) {
    const double delta = params.gap();
    if (delta < 1e-12) {
        throw GapTooSmall("qfi: Delta_g < 1e-12");
    }
    const double phase = std::sqrt(delta) * params.omega * t;
    const double osc = std::sin(phase) - phase;
    return 16.0 * params.g * params.g * osc * osc / (delta * delta * delta) * var_p0;
}

std::vector<LocalMax> local_maxima(const std::vector<double>& times,
                                   const std::vector<double>& values, int max_count,
                                   double floor_fraction) {
    std::vector<LocalMax> out;
    if (values.size() < 3) {
        return out;
    }
    double peak = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
    }
    const double floor = floor_fraction * peak;
    for (std::size_t i = 1; i + 1 < values.size() && static_cast<int>(out.size()) < max_count;
         ++i) {
        if (values[i] >= values[i - 1] && values[i] > values[i + 1] && values[i] > floor) {
            LocalMax lm{times[i], values[i]};
            const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
            const double curv = y0 - 2.0 * y1 + y2;
            if (curv < 0.0) {
                const double shift = 0.5 * (y0 - y2) / curv;
                lm.t = times[i] + shift * (times[i + 1] - times[i]);
                lm.value = y1 - 0.25 * (y0 - y2) * shift;
            }
            out.push_back(lm);
        }
    }
    return out;
}

} // namespace qrm
