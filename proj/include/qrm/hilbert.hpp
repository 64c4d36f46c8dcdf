// Truncated Fock-space operator algebra, model parameters and initial states.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qrm/errors.hpp"

namespace qrm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Energy gap of the normal phase, Delta_g = 4(1 - g^2).
double delta_gap(double g);

struct ModelParams {
    double omega = 1.0; // field frequency; sets the unit of energy and time
    double g = 0.0;     // dimensionless coupling, 0 <= g < 1 (normal phase)
    int trunc_dim = 60; // Fock truncation N

    void validate() const;
    double gap() const { return delta_gap(g); }
};

// Field operators on the N-dimensional truncated Fock space.
//
// a|n> = sqrt(n)|n-1>, x = (a + a^+)/sqrt(2), p = i(a^+ - a)/sqrt(2),
// g_op = xp + px, h_np = omega [p^2 + (1-g^2) x^2] / 2.
// [a, a^+] = I holds on the first N-1 diagonal entries; the last entry is a
// truncation artifact (it equals 1-N instead of 1).
struct OperatorSet {
    int dim = 0;
    Matrix a, a_dag, x, p, g_op, n_op, h_np;
};

OperatorSet build_operators(const ModelParams& params);

struct PureState {
    Vector amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
};

// (|0> + i|1>)/sqrt(2), the working initial state of the bosonic field.
PureState standard_initial_state(int n);

// Applies S(xi) = exp[(xi a^2 - xi a^+2)/2] for real xi (pipelines use the
// xi >= 0 convention; negative xi gives the inverse squeeze).
// Fails with TruncationOverflow if the squeezed state puts more than 1e-6
// population in the top 10% of Fock levels.
PureState squeeze_state(const PureState& state, double xi);

// Bose-Einstein mean photon number nbar = 1/(exp(omega/kT) - 1) and inverse.
double thermal_nbar(double kT_over_omega);
double kT_from_nbar(double nbar);

struct DensityMatrix {
    Matrix entries;

    static DensityMatrix from_pure(const PureState& psi);

    int dim() const { return static_cast<int>(entries.rows()); }
    double trace_deviation() const;       // |Tr(rho) - 1|
    double hermiticity_deviation() const; // max_ij |rho - rho^+|
    double min_eigenvalue() const;
};

Complex expectation(const Matrix& op, const PureState& psi);
Complex expectation(const Matrix& op, const DensityMatrix& rho);

// Real-valued accessor for Hermitian observables; discards the imaginary part
// (which must be <= 1e-10 in magnitude).
double expectation_real(const Matrix& op, const PureState& psi);
double expectation_real(const Matrix& op, const DensityMatrix& rho);

double variance(const Matrix& op, const PureState& psi);

} // namespace qrm
