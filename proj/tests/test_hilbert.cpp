#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrm/hilbert.hpp"

using namespace qrm;

namespace {

OperatorSet make_ops(int n, double g = 0.0) {
    ModelParams params;
    params.g = g;
    params.trunc_dim = n;
    return build_operators(params);
}

} // namespace

TEST_CASE("annihilation operator at N=2 is [[0,1],[0,0]]") {
    const OperatorSet ops = make_ops(2);
    CHECK(ops.a(0, 0) == Complex(0.0, 0.0));
    CHECK(ops.a(0, 1) == Complex(1.0, 0.0));
    CHECK(ops.a(1, 0) == Complex(0.0, 0.0));
    CHECK(ops.a(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("operator set invariants across dimensions") {
    for (int n : {2, 5, 17, 40}) {
        CAPTURE(n);
        const OperatorSet ops = make_ops(n, 0.5);
        CHECK((ops.x - ops.x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((ops.p - ops.p.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((ops.g_op - ops.g_op.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((ops.h_np - ops.h_np.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

        // [a, a+] = I on the first N-1 diagonal entries; the last entry is the
        // truncation artifact.
        const Matrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
        for (int k = 0; k < n - 1; ++k) {
            CHECK(std::abs(comm(k, k) - Complex(1.0, 0.0)) <= 1e-12);
        }
        CHECK(std::abs(comm(n - 1, n - 1) - Complex(1.0 - n, 0.0)) <= 1e-9);
    }
}

TEST_CASE("harmonic limit g=0: spectrum approximates n + 1/2") {
    const OperatorSet ops = make_ops(40, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(ops.h_np, Eigen::EigenvaluesOnly);
    const auto ev = solver.eigenvalues();
    for (int k = 0; k < 10; ++k) {
        CHECK(ev(k) == doctest::Approx(k + 0.5).epsilon(1e-9));
    }
}

TEST_CASE("coefficient of X^2 vanishes exactly at the critical point") {
    const OperatorSet crit = make_ops(12, 1.0);
    const Matrix p2_half = 0.5 * crit.p * crit.p;
    CHECK((crit.h_np - p2_half).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_operators rejects trunc_dim < 2") {
    ModelParams params;
    params.trunc_dim = 1;
    CHECK_THROWS_AS(build_operators(params), InvalidParameter);
}

TEST_CASE("delta_gap values") {
    CHECK(delta_gap(0.0) == doctest::Approx(4.0));
    CHECK(delta_gap(1.0) == doctest::Approx(0.0));
    CHECK(delta_gap(0.96) == doctest::Approx(0.3136).epsilon(1e-12));
    CHECK_THROWS_AS(delta_gap(1.5), InvalidParameter);
}

TEST_CASE("standard initial state moments") {
    const int n = 24;
    const OperatorSet ops = make_ops(n);
    const PureState psi = standard_initial_state(n);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation_real(ops.x, psi) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expectation_real(ops.p, psi) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(variance(ops.x, psi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation_real(ops.p * ops.p, psi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("squeeze_state basics") {
    const int n = 60;
    const OperatorSet ops = make_ops(n);
    const PureState psi = standard_initial_state(n);

    SUBCASE("xi=0 returns the state unchanged") {
        const PureState out = squeeze_state(psi, 0.0);
        CHECK((out.amplitudes - psi.amplitudes).norm() == doctest::Approx(0.0));
    }

    SUBCASE("squeezed vacuum variance e^{-2 xi}/2") {
        Vector vac = Vector::Zero(n);
        vac(0) = 1.0;
        const PureState out = squeeze_state(PureState{vac}, 0.5);
        CHECK(variance(ops.x, out) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-6));
        CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("inverse squeeze returns the original state") {
        for (double xi : {0.3, 0.8}) {
            const PureState fwd = squeeze_state(psi, xi);
            const PureState back = squeeze_state(fwd, -xi);
            CHECK((back.amplitudes - psi.amplitudes).norm() <= 1e-8);
        }
    }

    SUBCASE("truncation guard fires when the basis is too small") {
        const PureState small = standard_initial_state(8);
        CHECK_THROWS_AS(squeeze_state(small, 1.2), TruncationOverflow);
    }
}

TEST_CASE("squeeze operator is unitary within 1e-9") {
    const int n = 80;
    for (double xi : {0.2, 0.8}) {
        CAPTURE(xi);
        // Unitarity checked through norm preservation over a basis sample.
        for (int k : {0, 1, 2, 4}) {
            Vector e = Vector::Zero(n);
            e(k) = 1.0;
            const PureState out = squeeze_state(PureState{e}, xi);
            CHECK(std::abs(out.norm() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("uncertainty product for prepared states") {
    const int n = 80;
    const OperatorSet ops = make_ops(n);
    auto product = [&](const PureState& psi) {
        return variance(ops.x, psi) * variance(ops.p, psi);
    };
    CHECK(product(standard_initial_state(n)) >= 0.25 - 1e-9);
    for (double xi : {0.2, 0.5, 1.0}) {
        CHECK(product(squeeze_state(standard_initial_state(n), xi)) >= 0.25 - 1e-9);
    }
}

TEST_CASE("thermal occupation map and inverse") {
    CHECK(thermal_nbar(0.0) == doctest::Approx(0.0));
    CHECK(thermal_nbar(1e-6) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(thermal_nbar(1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-12));
    CHECK(kT_from_nbar(1.0) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));

    // Strictly increasing in kT.
    double prev = 0.0;
    for (double kt = 0.05; kt <= 5.0; kt += 0.05) {
        const double cur = thermal_nbar(kt);
        CHECK(cur > prev);
        prev = cur;
    }

    // Round trip.
    for (double nbar : {0.3, 1.0, 4.2}) {
        CHECK(thermal_nbar(kT_from_nbar(nbar)) == doctest::Approx(nbar).epsilon(1e-12));
    }
}

TEST_CASE("expectation values and errors") {
    const int n = 12;
    const OperatorSet ops = make_ops(n);
    Vector one = Vector::Zero(n);
    one(1) = 1.0;
    CHECK(expectation_real(ops.n_op, PureState{one}) == doctest::Approx(1.0));

    const DensityMatrix rho = DensityMatrix::from_pure(standard_initial_state(n));
    CHECK(expectation_real(ops.x, rho) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expectation_real(ops.p * ops.p, rho) == doctest::Approx(1.0).epsilon(1e-12));

    const OperatorSet small = make_ops(6);
    CHECK_THROWS_AS(expectation(small.x, standard_initial_state(n)), DimensionMismatch);
}

TEST_CASE("density matrix diagnostics") {
    const DensityMatrix rho = DensityMatrix::from_pure(standard_initial_state(10));
    CHECK(rho.trace_deviation() <= 1e-12);
    CHECK(rho.hermiticity_deviation() <= 1e-12);
    CHECK(rho.min_eigenvalue() >= -1e-12);
}
