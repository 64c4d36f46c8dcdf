// Semiclassical moment equations for single-photon relaxation, their exact
// solution, the stationary point, and the closed-form inverted variance.
#pragma once

#include <vector>

#include "qrm/dynamics_types.hpp"
#include "qrm/hilbert.hpp"

namespace qrm {

// (<X>, <P>, <X^2>, <P^2>, <G>) with G = XP + PX.
struct MomentVector {
    double ex = 0.0;
    double ep = 0.0;
    double exx = 0.0;
    double epp = 0.0;
    double eg = 0.0;

    double var_x() const { return exx - ex * ex; }
    double var_p() const { return epp - ep * ep; }
};

// First and second moments of the initial field state.
struct InitialConditions {
    double x0 = 0.0;
    double p0 = 0.0;
    double var_x0 = 1.0;
    double var_p0 = 1.0;
    double cov_re0 = 0.0; // Re Cov(X,P) = <G>/2 - <X><P>

    static InitialConditions from_state(const PureState& psi, const OperatorSet& ops);

    // Raw moments (<X>,<P>,<X^2>,<P^2>,<G>) for the ODE system.
    MomentVector raw() const;
};

// Time derivatives of the five moments; rejects two-photon relaxation
// (the system closes only for linear jump operators).
MomentVector moment_rhs(const MomentVector& m, const ModelParams& params,
                        const NoiseParams& noise);

// Rate-level form: gamma_a, gamma_h need not come from a (kappa, nbar) pair.
MomentVector moment_rhs_rates(const MomentVector& m, double omega, double delta,
                              double gamma_a, double gamma_h);

// Exact solution of the moment system on the given time grid (matrix
// exponential of the 2x2 first-moment block and the forced 3x3 second-moment
// block); valid for any kappa >= 0 including kappa = 0.
std::vector<MomentVector> evolve_moments(const InitialConditions& init,
                                         const ModelParams& params,
                                         const NoiseParams& noise,
                                         const std::vector<double>& grid);

// Closed-form inverted variance F_g(t) for single-photon relaxation.
double analytic_fg(double t, const ModelParams& params, const NoiseParams& noise,
                   const InitialConditions& init);

struct NoiseFreeMax {
    double tau = 0.0;
    double fg = 0.0;
};

// Noise-free local maximum: tau = 2 m pi / (sqrt(Delta_g) omega) and
// F_g(tau) = 16 g^2 omega^2 Delta_g^-2 tau^2 <P(0)>^2 / Var(X)(0).
NoiseFreeMax noise_free_max(const ModelParams& params, int m, const InitialConditions& init);

// Stationary second moments (first moments decay to zero); requires kappa > 0.
MomentVector stationary_moments(const ModelParams& params, const NoiseParams& noise);

} // namespace qrm
