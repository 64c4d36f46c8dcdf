// Adaptive Dormand-Prince 5(4) stepper with embedded error control.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrm/errors.hpp"

namespace qrm {

struct Rk45Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step_factor = 1e-13; // minimum step as a fraction of the span
};

// Vec is an Eigen vector (real or complex). Rhs has signature
// void(double t, const Vec& y, Vec& dydt). PostStep is invoked after every
// accepted step as void(double t, Vec& y) and may apply small corrections
// (Hermitian symmetrization, trace renormalization); corrections must stay at
// rounding level or the reused FSAL stage degrades the error estimate.
template <class Vec>
class Rk45 {
public:
    explicit Rk45(Rk45Options opt) : opt_(opt) {}

    template <class Rhs, class PostStep>
    void integrate_to(Rhs&& rhs, PostStep&& post, Vec& y, double& t, double t_target) {
        if (t_target <= t) {
            return;
        }
        const double span = t_target - t;
        if (!k1_valid_) {
            resize_like(y);
            rhs(t, y, k1_);
            k1_valid_ = true;
        }
        if (h_ <= 0.0) {
            h_ = initial_step(y, span);
        }
        const double h_min = opt_.min_step_factor * span;

        while (t < t_target) {
            double h = std::min({h_, opt_.max_step, t_target - t});
            const double err = attempt_step(rhs, y, t, h);
            if (err <= 1.0) {
                t += h;
                y.swap(ynew_);
                k1_.swap(k7_); // FSAL
                post(t, y);
                const double grow = (err == 0.0) ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                h_ = h * std::max(0.2, grow);
            } else {
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h_ < h_min) {
                    throw StepFailure("rk45: step size underflow at t = " + std::to_string(t) +
                                      " (h = " + std::to_string(h_) + ")");
                }
            }
        }
    }

    // Invalidate the cached FSAL stage (call if y is changed externally).
    void reset() { k1_valid_ = false; }

private:
    void resize_like(const Vec& y) {
        for (Vec* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_}) {
            v->resizeLike(y);
        }
    }

    double scaled_norm(const Vec& e, const Vec& y0, const Vec& y1) const {
        double acc = 0.0;
        const auto n = e.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt_.abs_tol +
                              opt_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double q = std::abs(e[i]) / sc;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(n));
    }

    double initial_step(const Vec& y, double span) const {
        double ynorm = 0.0, fnorm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1_[i]));
        }
        double h = (fnorm > 0.0) ? 0.01 * (ynorm + opt_.abs_tol) / fnorm : 1e-6 * span;
        return std::clamp(h, 1e-10 * span, 1e-2 * span);
    }

    template <class Rhs>
    double attempt_step(Rhs&& rhs, const Vec& y, double t, double h) {
        ytmp_ = y + h * (a21 * k1_);
        rhs(t + c2 * h, ytmp_, k2_);
        ytmp_ = y + h * (a31 * k1_ + a32 * k2_);
        rhs(t + c3 * h, ytmp_, k3_);
        ytmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs(t + c4 * h, ytmp_, k4_);
        ytmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs(t + c5 * h, ytmp_, k5_);
        ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs(t + h, ytmp_, k6_);
        ynew_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
        rhs(t + h, ynew_, k7_);
        ytmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
        return scaled_norm(ytmp_, y, ynew_);
    }

    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    Rk45Options opt_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_;
    double h_ = 0.0;
    bool k1_valid_ = false;
};

} // namespace qrm
