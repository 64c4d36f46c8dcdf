#include "qrm/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "qrm/rk45.hpp"

namespace qrm {

std::vector<double> Trajectory::var_x_series() const {
    std::vector<double> out(moments.size());
    for (std::size_t i = 0; i < moments.size(); ++i) {
        out[i] = moments[i].var_x();
    }
    return out;
}

std::vector<double> Trajectory::ex_series() const {
    std::vector<double> out(moments.size());
    for (std::size_t i = 0; i < moments.size(); ++i) {
        out[i] = moments[i].ex;
    }
    return out;
}

Matrix dissipator(const Matrix& jump, const Matrix& rho) {
    if (jump.rows() != rho.rows() || jump.cols() != rho.cols()) {
        throw DimensionMismatch("dissipator: operator and state dimensions differ");
    }
    const Matrix jd = jump.adjoint();
    const Matrix jdj = jd * jump;
    return jump * rho * jd - 0.5 * (jdj * rho + rho * jdj);
}

namespace {

Matrix jump_op(const OperatorSet& ops, const NoiseParams& noise) {
    return noise.kind == RelaxationKind::SinglePhoton ? ops.a
                                                      : Matrix(ops.a * ops.a);
}

} // namespace

Matrix dissipative_rhs(const Matrix& rho, const OperatorSet& ops, const NoiseParams& noise) {
    noise.validate();
    const Matrix jump = jump_op(ops, noise);
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    if (noise.gamma_a() > 0.0) {
        out += noise.gamma_a() * dissipator(jump, rho);
    }
    if (noise.gamma_h() > 0.0) {
        out += noise.gamma_h() * dissipator(jump.adjoint(), rho);
    }
    return out;
}

Matrix lindblad_rhs(const Matrix& rho, const OperatorSet& ops, const NoiseParams& noise) {
    if (rho.rows() != ops.h_np.rows()) {
        throw DimensionMismatch("lindblad_rhs: state and operator dimensions differ");
    }
    const Complex minus_i(0.0, -1.0);
    Matrix out = minus_i * (ops.h_np * rho - rho * ops.h_np);
    out += dissipative_rhs(rho, ops, noise);
    return out;
}

namespace {

using Sparse = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

// vec is column-major: vec(A rho B) = (B^T kron A) vec(rho).
void kron_into(std::vector<Triplet>& trips, const Sparse& left, const Sparse& right,
               Complex scale) {
    const int n = static_cast<int>(right.rows());
    for (int ko = 0; ko < left.outerSize(); ++ko) {
        for (Sparse::InnerIterator it_l(left, ko); it_l; ++it_l) {
            for (int ki = 0; ki < right.outerSize(); ++ki) {
                for (Sparse::InnerIterator it_r(right, ki); it_r; ++it_r) {
                    trips.emplace_back(static_cast<int>(it_l.row()) * n + it_r.row(),
                                       static_cast<int>(it_l.col()) * n + it_r.col(),
                                       scale * it_l.value() * it_r.value());
                }
            }
        }
    }
}

Sparse sparsify(const Matrix& m) {
    Sparse s = m.sparseView(1.0, 0.0);
    s.makeCompressed();
    return s;
}

} // namespace

Eigen::SparseMatrix<Complex> build_liouvillian(const OperatorSet& ops,
                                               const NoiseParams& noise) {
    noise.validate();
    const int n = ops.dim;
    const Sparse ident = Matrix(Matrix::Identity(n, n)).sparseView();
    const Sparse h = sparsify(ops.h_np);
    const Sparse jump = sparsify(jump_op(ops, noise));

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(20) * n * n);

    const Complex minus_i(0.0, -1.0);
    kron_into(trips, ident, h, minus_i);                         // -i H rho
    kron_into(trips, Sparse(h.transpose()), ident, -minus_i);    // +i rho H

    auto add_dissipator = [&](const Sparse& l, double rate) {
        if (rate <= 0.0) {
            return;
        }
        const Sparse ld = l.adjoint();
        Sparse ldl = ld * l;
        ldl.makeCompressed();
        kron_into(trips, Sparse(l.conjugate()), l, Complex(rate, 0.0)); // L rho L^+
        kron_into(trips, ident, ldl, Complex(-0.5 * rate, 0.0));        // -1/2 L^+L rho
        kron_into(trips, Sparse(ldl.transpose()), ident, Complex(-0.5 * rate, 0.0));
    };
    add_dissipator(jump, noise.gamma_a());
    add_dissipator(Sparse(jump.adjoint()), noise.gamma_h());

    Sparse liouv(n * n, n * n);
    liouv.setFromTriplets(trips.begin(), trips.end());
    liouv.makeCompressed();
    return liouv;
}

double default_horizon(const NoiseParams& noise, double omega) {
    const double cap = 2000.0 / omega;
    if (noise.kappa > 0.0) {
        return std::min(8.0 / noise.kappa, cap);
    }
    return cap;
}

namespace {

// Tr(O rho) for sparse O and column-major rho buffer.
double sparse_trace_expect(const Sparse& op, const Complex* rho, int n) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < op.outerSize(); ++j) {
        for (Sparse::InnerIterator it(op, j); it; ++it) {
            // O(i,j) * rho(j,i); rho is column-major.
            acc += it.value() * rho[static_cast<std::size_t>(it.row()) * n + it.col()];
        }
    }
    return acc.real();
}

} // namespace

Trajectory evolve(const DensityMatrix& rho0, const OperatorSet& ops, const NoiseParams& noise,
                  const IntegratorConfig& cfg) {
    cfg.validate();
    noise.validate();
    const int n = ops.dim;
    if (rho0.dim() != n) {
        throw DimensionMismatch("evolve: initial state and operators have different dimensions");
    }

    const double t_max = cfg.t_max > 0.0 ? cfg.t_max : default_horizon(noise);
    const Sparse liouv = build_liouvillian(ops, noise);
    const Sparse obs_x = sparsify(ops.x);
    const Sparse obs_p = sparsify(ops.p);
    const Sparse obs_xx = sparsify(ops.x * ops.x);
    const Sparse obs_pp = sparsify(ops.p * ops.p);
    const Sparse obs_g = sparsify(ops.g_op);
    const int tail_start = 9 * n / 10;

    Vector y = Eigen::Map<const Vector>(rho0.entries.data(), n * n);

    Rk45Options opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    Rk45<Vector> stepper(opt);

    Trajectory traj;
    traj.times.resize(cfg.n_samples);
    traj.moments.resize(cfg.n_samples);
    traj.diagnostics.resize(cfg.n_samples);
    traj.min_eigenvalue = rho0.min_eigenvalue();

    double last_herm_dev = rho0.hermiticity_deviation();
    double last_trace_dev = rho0.trace_deviation();

    auto rhs = [&](double, const Vector& state, Vector& out) { out.noalias() = liouv * state; };
    auto post = [&](double t, Vector& state) {
        Eigen::Map<Matrix> rho(state.data(), n, n);
        double herm = 0.0;
        for (int j = 0; j < n; ++j) {
            rho(j, j) = Complex(rho(j, j).real(), 0.0);
            for (int i = j + 1; i < n; ++i) {
                const Complex avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
                herm = std::max(herm, std::abs(rho(i, j) - std::conj(rho(j, i))));
                rho(i, j) = avg;
                rho(j, i) = std::conj(avg);
            }
        }
        double trace = 0.0;
        for (int j = 0; j < n; ++j) {
            trace += rho(j, j).real();
        }
        const double drift = std::abs(trace - 1.0);
        if (drift >= 1e-9) {
            throw StepFailure("evolve: trace drift " + std::to_string(drift) + " at t = " +
                              std::to_string(t) + " exceeds 1e-9 (integrator misconfigured)");
        }
        state *= (1.0 / trace);
        last_herm_dev = herm;
        last_trace_dev = drift;
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    };

    auto record = [&](int k, double t) {
        traj.times[k] = t;
        MomentVector& m = traj.moments[k];
        const Complex* buf = y.data();
        m.ex = sparse_trace_expect(obs_x, buf, n);
        m.ep = sparse_trace_expect(obs_p, buf, n);
        m.exx = sparse_trace_expect(obs_xx, buf, n);
        m.epp = sparse_trace_expect(obs_pp, buf, n);
        m.eg = sparse_trace_expect(obs_g, buf, n);

        double tail = 0.0;
        for (int d = tail_start; d < n; ++d) {
            tail += buf[static_cast<std::size_t>(d) * n + d].real();
        }
        traj.diagnostics[k] = SampleDiagnostics{last_trace_dev, last_herm_dev, tail};
        if (tail > cfg.tail_tol) {
            throw TruncationOverflow("evolve: top-decile population " + std::to_string(tail) +
                                     " exceeds " + std::to_string(cfg.tail_tol) + " at t = " +
                                     std::to_string(t) + "; increase trunc_dim");
        }
        if (k % 10 == 0) {
            Eigen::Map<const Matrix> rho(y.data(), n, n);
            Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
            const double lam = solver.eigenvalues().minCoeff();
            traj.min_eigenvalue = std::min(traj.min_eigenvalue, lam);
            if (lam < -1e-8) {
                throw TruncationOverflow("evolve: density matrix eigenvalue " +
                                         std::to_string(lam) + " below -1e-8 at t = " +
                                         std::to_string(t));
            }
        }
    };

    record(0, 0.0);
    double t = 0.0;
    const double dt = t_max / (cfg.n_samples - 1);
    for (int k = 1; k < cfg.n_samples; ++k) {
        stepper.integrate_to(rhs, post, y, t, k * dt);
        record(k, t);
    }
    return traj;
}

std::string to_string(RelaxationKind kind) {
    return kind == RelaxationKind::SinglePhoton ? "single_photon" : "two_photon";
}

} // namespace qrm
