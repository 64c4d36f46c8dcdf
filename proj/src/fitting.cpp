#include "qrm/fitting.hpp"

#include <cmath>
#include <vector>

namespace qrm {

FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DimensionMismatch("fit_power_law: coordinate lists differ in length");
    }
    const std::size_t n = xs.size();
    if (n < 3) {
        throw NonpositiveData("fit_power_law: need at least 3 points, got " + std::to_string(n));
    }

    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw NonpositiveData("fit_power_law: all coordinates must be strictly positive");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        throw DegenerateAbscissa("fit_power_law: all x values coincide");
    }

    FitResult fit;
    fit.b = sxy / sxx;
    const double intercept = my - fit.b * mx;
    fit.a = std::exp(intercept);
    fit.n_points = static_cast<int>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + fit.b * lx[i]);
        ss += r * r;
    }
    fit.rms_log_residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

} // namespace qrm
