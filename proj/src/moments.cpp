#include "qrm/moments.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qrm {

InitialConditions InitialConditions::from_state(const PureState& psi, const OperatorSet& ops) {
    InitialConditions init;
    init.x0 = expectation_real(ops.x, psi);
    init.p0 = expectation_real(ops.p, psi);
    init.var_x0 = expectation_real(ops.x * ops.x, psi) - init.x0 * init.x0;
    init.var_p0 = expectation_real(ops.p * ops.p, psi) - init.p0 * init.p0;
    init.cov_re0 = 0.5 * expectation_real(ops.g_op, psi) - init.x0 * init.p0;
    if (!(init.var_x0 > 0.0) || !(init.var_p0 > 0.0)) {
        throw NonpositiveVariance("InitialConditions: quadrature variances must be positive");
    }
    return init;
}

MomentVector InitialConditions::raw() const {
    MomentVector m;
    m.ex = x0;
    m.ep = p0;
    m.exx = var_x0 + x0 * x0;
    m.epp = var_p0 + p0 * p0;
    m.eg = 2.0 * (cov_re0 + x0 * p0);
    return m;
}

MomentVector moment_rhs_rates(const MomentVector& m, double omega, double delta,
                              double gamma_a, double gamma_h) {
    const double damp = gamma_a - gamma_h;
    const double pump = 0.5 * (gamma_a + gamma_h);
    MomentVector d;
    d.ex = -0.5 * damp * m.ex + omega * m.ep;
    d.ep = -0.5 * damp * m.ep - 0.25 * delta * omega * m.ex;
    d.exx = -damp * m.exx + omega * m.eg + pump;
    d.epp = -damp * m.epp - 0.25 * delta * omega * m.eg + pump;
    d.eg = -damp * m.eg + 2.0 * omega * m.epp - 0.5 * delta * omega * m.exx;
    return d;
}

MomentVector moment_rhs(const MomentVector& m, const ModelParams& params,
                        const NoiseParams& noise) {
    if (noise.kind == RelaxationKind::TwoPhoton) {
        throw ClosureViolation(
            "moment_rhs: the semiclassical system is not closed for two-photon relaxation");
    }
    return moment_rhs_rates(m, params.omega, params.gap(), noise.gamma_a(), noise.gamma_h());
}

namespace {

// First-moment generator and forcing-augmented second-moment generator.
Eigen::Matrix2d first_block(double omega, double delta, double kappa) {
    Eigen::Matrix2d m;
    m << -0.5 * kappa, omega, -0.25 * delta * omega, -0.5 * kappa;
    return m;
}

Eigen::Matrix4d second_block_aug(double omega, double delta, double kappa, double pump) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = -kappa;
    m(0, 2) = omega;
    m(1, 1) = -kappa;
    m(1, 2) = -0.25 * delta * omega;
    m(2, 0) = -0.5 * delta * omega;
    m(2, 1) = 2.0 * omega;
    m(2, 2) = -kappa;
    m(0, 3) = pump;
    m(1, 3) = pump;
    return m;
}

} // namespace

std::vector<MomentVector> evolve_moments(const InitialConditions& init,
                                         const ModelParams& params,
                                         const NoiseParams& noise,
                                         const std::vector<double>& grid) {
    params.validate();
    noise.validate();
    if (noise.kind == RelaxationKind::TwoPhoton) {
        throw ClosureViolation(
            "evolve_moments: the semiclassical system is not closed for two-photon relaxation");
    }
    const double kappa = noise.gamma_a() - noise.gamma_h();
    const double pump = 0.5 * (noise.gamma_a() + noise.gamma_h());
    const Eigen::Matrix2d m1 = first_block(params.omega, params.gap(), kappa);
    const Eigen::Matrix4d m2 = second_block_aug(params.omega, params.gap(), kappa, pump);

    const MomentVector raw = init.raw();
    const Eigen::Vector2d v1(raw.ex, raw.ep);
    const Eigen::Vector4d v2(raw.exx, raw.epp, raw.eg, 1.0);

    std::vector<MomentVector> out;
    out.reserve(grid.size());
    for (double t : grid) {
        const Eigen::Vector2d w1 = (m1 * t).exp() * v1;
        const Eigen::Vector4d w2 = (m2 * t).exp() * v2;
        MomentVector m;
        m.ex = w1(0);
        m.ep = w1(1);
        m.exx = w2(0);
        m.epp = w2(1);
        m.eg = w2(2);
        out.push_back(m);
    }
    return out;
}

double analytic_fg(double t, const ModelParams& params, const NoiseParams& noise,
                   const InitialConditions& init) {
    if (noise.kind == RelaxationKind::TwoPhoton) {
        throw ClosureViolation("analytic_fg: defined for single-photon relaxation only");
    }
    const double delta = params.gap();
    if (delta < 1e-12) {
        throw GapTooSmall("analytic_fg: Delta_g < 1e-12");
    }
    const double omega = params.omega;
    const double kappa = noise.kappa;
    const double sd = std::sqrt(delta);
    const double half_phase = 0.5 * sd * omega * t;
    const double phase = sd * omega * t;

    const double a_t = (delta * omega * t * init.x0 + 4.0 * init.p0) * std::sin(half_phase) -
                       2.0 * sd * omega * t * init.p0 * std::cos(half_phase);
    const double b_t = 2.0 * delta * (1.0 + std::cos(phase)) * init.var_x0 +
                       8.0 * (1.0 - std::cos(phase)) * init.var_p0 +
                       8.0 * sd * std::sin(phase) * init.cov_re0;
    const double c_t =
        delta * (delta * omega * omega + 4.0 * omega * omega + 2.0 * kappa * kappa) *
            std::expm1(kappa * t) -
        (4.0 - delta) * (kappa * kappa * (1.0 - std::cos(phase)) +
                         sd * omega * kappa * std::sin(phase));

    const double den =
        b_t + (2.0 * noise.nbar + 1.0) / (delta * omega * omega + kappa * kappa) * c_t;
    if (den == 0.0) {
        throw NonpositiveVariance("analytic_fg: vanishing denominator");
    }
    return 4.0 * (4.0 - delta) * a_t * a_t / (delta * delta * den);
}

NoiseFreeMax noise_free_max(const ModelParams& params, int m, const InitialConditions& init) {
    if (m < 1) {
        throw InvalidParameter("noise_free_max: m must be >= 1");
    }
    const double delta = params.gap();
    if (delta < 1e-12) {
        throw GapTooSmall("noise_free_max: Delta_g < 1e-12");
    }
    NoiseFreeMax result;
    result.tau = 2.0 * m * M_PI / (std::sqrt(delta) * params.omega);
    result.fg = 16.0 * params.g * params.g * params.omega * params.omega * result.tau *
                result.tau * init.p0 * init.p0 / (delta * delta * init.var_x0);
    return result;
}

MomentVector stationary_moments(const ModelParams& params, const NoiseParams& noise) {
    if (noise.kind == RelaxationKind::TwoPhoton) {
        throw ClosureViolation("stationary_moments: single-photon relaxation only");
    }
    if (!(noise.kappa > 0.0)) {
        throw InvalidParameter("stationary_moments: kappa must be positive");
    }
    const double delta = params.gap();
    if (delta < 1e-12) {
        throw GapTooSmall("stationary_moments: Delta_g < 1e-12");
    }
    const double kappa = noise.gamma_a() - noise.gamma_h();
    const double pump = 0.5 * (noise.gamma_a() + noise.gamma_h());
    Eigen::Matrix3d a;
    a << -kappa, 0.0, params.omega,
         0.0, -kappa, -0.25 * delta * params.omega,
         -0.5 * delta * params.omega, 2.0 * params.omega, -kappa;
    const Eigen::Vector3d b(-pump, -pump, 0.0);
    const Eigen::Vector3d v = a.colPivHouseholderQr().solve(b);
    MomentVector m;
    m.exx = v(0);
    m.epp = v(1);
    m.eg = v(2);
    return m;
}

} // namespace qrm
