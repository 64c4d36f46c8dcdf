// Precision quantities: sensitivity chi_g, inverted variance F_g, envelope
// maximum, and the quantum Fisher information.
#pragma once

#include <vector>

#include "qrm/dynamics.hpp"

namespace qrm {

struct FgSeries {
    std::vector<double> times;
    std::vector<double> fg;
    std::vector<double> chi;
    std::vector<double> var_x;
};

struct MaxResult {
    double t_star = 0.0;
    double fg_max = 0.0;
    bool refined = false;
};

// Central difference (<X>_{g+d} - <X>_{g-d})/(2d) on a shared time grid.
std::vector<double> chi_g(const Trajectory& minus, const Trajectory& zero,
                          const Trajectory& plus, double delta_g);

FgSeries inverted_variance(const std::vector<double>& times, const std::vector<double>& chi,
                           const std::vector<double>& var_x);

// Global envelope maximum over the horizon, refined by quadratic interpolation
// through the three samples around the grid argmax. Throws PeakAtBoundary if
// the maximum lies in the final 5% of the grid.
MaxResult max_inverted_variance(const FgSeries& series);

// QFI for estimating g: 16 g^2 [sin(sqrt(D) w t) - sqrt(D) w t]^2 / D^3 * Var(P)(0).
double qfi(const ModelParams& params, double t, double var_p0);

// Local maxima of a sampled series (parabola-refined), in time order.
struct LocalMax {
    double t = 0.0;
    double value = 0.0;
};
std::vector<LocalMax> local_maxima(const std::vector<double>& times,
                                   const std::vector<double>& values, int max_count,
                                   double floor_fraction = 1e-3);

} // namespace qrm
