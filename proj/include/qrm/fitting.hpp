// Power-law regression y = a x^b via least squares in log-log space.
#pragma once

#include <span>

#include "qrm/errors.hpp"

namespace qrm {

struct FitResult {
    double a = 0.0;                // prefactor, a > 0
    double b = 0.0;                // exponent (signed log-log slope)
    double rms_log_residual = 0.0; // rms residual of ln y about the fit line
    int n_points = 0;
};

FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys);

} // namespace qrm
