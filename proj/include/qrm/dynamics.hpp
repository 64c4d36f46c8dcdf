// Lindblad generator for single- and two-photon relaxation and the adaptive
// master-equation integrator.
#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "qrm/dynamics_types.hpp"
#include "qrm/hilbert.hpp"
#include "qrm/moments.hpp"

namespace qrm {

struct SampleDiagnostics {
    double trace_dev = 0.0; // |Tr(rho) - 1| before renormalization
    double herm_dev = 0.0;  // max |rho - rho^+| before symmetrization
    double tail_pop = 0.0;  // population in the top 10% of Fock levels
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MomentVector> moments;
    std::vector<SampleDiagnostics> diagnostics;
    double min_eigenvalue = 0.0;  // smallest eigenvalue seen in positivity checks
    double max_trace_drift = 0.0; // largest per-step trace drift over the run

    std::size_t size() const { return times.size(); }
    std::vector<double> var_x_series() const;
    std::vector<double> ex_series() const;
};

// D[L] rho = L rho L^+ - (L^+ L rho + rho L^+ L)/2.
Matrix dissipator(const Matrix& jump, const Matrix& rho);

// Full right-hand side -i[H_np, rho] + gamma_a D[L] + gamma_h D[L^+], with
// L = a (single-photon) or L = a^2 (two-photon).
Matrix lindblad_rhs(const Matrix& rho, const OperatorSet& ops, const NoiseParams& noise);

// Jump-operator terms only (Hamiltonian removed).
Matrix dissipative_rhs(const Matrix& rho, const OperatorSet& ops, const NoiseParams& noise);

// The generator as a sparse superoperator acting on column-major vec(rho).
Eigen::SparseMatrix<Complex> build_liouvillian(const OperatorSet& ops, const NoiseParams& noise);

// Default envelope-search horizon min(8/kappa, 2000/omega).
double default_horizon(const NoiseParams& noise, double omega = 1.0);

// Integrates the master equation on a uniform sample grid, recording the five
// quadrature moments and per-sample diagnostics. The density matrix is
// symmetrized after every accepted step; the trace is renormalized only while
// the drift stays below 1e-9 (larger drift rejects the run). Throws
// TruncationOverflow when the top-decile Fock population exceeds
// cfg.tail_tol, StepFailure on step-size underflow.
Trajectory evolve(const DensityMatrix& rho0, const OperatorSet& ops, const NoiseParams& noise,
                  const IntegratorConfig& cfg);

} // namespace qrm
