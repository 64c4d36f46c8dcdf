#include "qrm/hilbert.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qrm {

double delta_gap(double g) {
    if (g < 0.0 || g > 1.0) {
        throw InvalidParameter("delta_gap: g must lie in [0, 1], got " + std::to_string(g));
    }
    return 4.0 * (1.0 - g * g);
}

void ModelParams::validate() const {
    if (!(omega > 0.0)) {
        throw InvalidParameter("ModelParams: omega must be positive");
    }
    if (g < 0.0 || g > 1.0) {
        throw InvalidParameter("ModelParams: g must lie in [0, 1], got " + std::to_string(g));
    }
    if (trunc_dim < 2) {
        throw InvalidParameter("ModelParams: trunc_dim must be >= 2, got " +
                               std::to_string(trunc_dim));
    }
}

OperatorSet build_operators(const ModelParams& params) {
    params.validate();
    const int n = params.trunc_dim;

    OperatorSet ops;
    ops.dim = n;
    ops.a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    ops.a_dag = ops.a.adjoint();

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ops.x = (ops.a + ops.a_dag) * inv_sqrt2;
    ops.p = Complex(0.0, 1.0) * (ops.a_dag - ops.a) * inv_sqrt2;
    ops.g_op = ops.x * ops.p + ops.p * ops.x;
    ops.n_op = ops.a_dag * ops.a;
    ops.h_np = params.omega * 0.5 *
               (ops.p * ops.p + (1.0 - params.g * params.g) * (ops.x * ops.x));
    return ops;
}

PureState standard_initial_state(int n) {
    if (n < 2) {
        throw InvalidParameter("standard_initial_state: need dimension >= 2");
    }
    Vector amp = Vector::Zero(n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    amp(0) = Complex(inv_sqrt2, 0.0);
    amp(1) = Complex(0.0, inv_sqrt2);
    return PureState{std::move(amp)};
}

PureState squeeze_state(const PureState& state, double xi) {
    if (xi == 0.0) {
        return state;
    }
    const int n = state.dim();
    // Generator (xi/2)(a^2 - a^+2) is real antisymmetric, so exp is orthogonal
    // and the result stays normalized to rounding.
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
    for (int k = 2; k < n; ++k) {
        const double c = 0.5 * xi * std::sqrt(static_cast<double>(k) * (k - 1));
        gen(k - 2, k) = c;
        gen(k, k - 2) = -c;
    }
    const Eigen::MatrixXd s = gen.exp();
    PureState out{s.cast<Complex>() * state.amplitudes};

    const int tail_start = 9 * n / 10; // top 10% of Fock levels
    double tail = 0.0;
    for (int k = tail_start; k < n; ++k) {
        tail += std::norm(out.amplitudes(k));
    }
    if (tail > 1e-6) {
        throw TruncationOverflow("squeeze_state: top-decile population " + std::to_string(tail) +
                                 " exceeds 1e-6; increase trunc_dim");
    }
    return out;
}

double thermal_nbar(double kT_over_omega) {
    if (kT_over_omega < 0.0) {
        throw InvalidParameter("thermal_nbar: kT/omega must be non-negative");
    }
    if (kT_over_omega == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(1.0 / kT_over_omega);
}

double kT_from_nbar(double nbar) {
    if (!(nbar > 0.0)) {
        throw InvalidParameter("kT_from_nbar: nbar must be positive");
    }
    return 1.0 / std::log1p(1.0 / nbar);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return DensityMatrix{psi.amplitudes * psi.amplitudes.adjoint()};
}

double DensityMatrix::trace_deviation() const {
    return std::abs(entries.trace() - Complex(1.0, 0.0));
}

double DensityMatrix::hermiticity_deviation() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Matrix herm = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace {

void check_dims(Eigen::Index op_rows, Eigen::Index op_cols, Eigen::Index state_dim) {
    if (op_rows != op_cols || op_rows != state_dim) {
        throw DimensionMismatch("expectation: operator is " + std::to_string(op_rows) + "x" +
                                std::to_string(op_cols) + " but state has dimension " +
                                std::to_string(state_dim));
    }
}

} // namespace

Complex expectation(const Matrix& op, const PureState& psi) {
    check_dims(op.rows(), op.cols(), psi.amplitudes.size());
    return psi.amplitudes.dot(op * psi.amplitudes);
}

Complex expectation(const Matrix& op, const DensityMatrix& rho) {
    check_dims(op.rows(), op.cols(), rho.entries.rows());
    return (op * rho.entries).trace();
}

namespace {

double take_real(Complex value) {
    if (std::abs(value.imag()) > 1e-10) {
        throw InvalidParameter("expectation_real: imaginary part " +
                               std::to_string(value.imag()) + " exceeds 1e-10");
    }
    return value.real();
}

} // namespace

double expectation_real(const Matrix& op, const PureState& psi) {
    return take_real(expectation(op, psi));
}

double expectation_real(const Matrix& op, const DensityMatrix& rho) {
    return take_real(expectation(op, rho));
}

double variance(const Matrix& op, const PureState& psi) {
    const double mean = expectation_real(op, psi);
    return expectation_real(op * op, psi) - mean * mean;
}

} // namespace qrm
