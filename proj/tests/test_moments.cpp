#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qrm/moments.hpp"
#include "qrm/rk45.hpp"

using namespace qrm;

namespace {

ModelParams model(double g) {
    ModelParams m;
    m.g = g;
    m.trunc_dim = 60;
    return m;
}

NoiseParams noise(double kappa, double nbar = 0.0) {
    NoiseParams n;
    n.kappa = kappa;
    n.nbar = nbar;
    return n;
}

InitialConditions standard_init() {
    InitialConditions init;
    init.x0 = 0.0;
    init.p0 = 1.0 / std::sqrt(2.0);
    init.var_x0 = 1.0;
    init.var_p0 = 0.5;
    init.cov_re0 = 0.0;
    return init;
}

// Central difference in g of the exact <X(t)>.
double chi_from_moments(double t, const ModelParams& m, const NoiseParams& n,
                        const InitialConditions& init, double dg) {
    ModelParams lo = m, hi = m;
    lo.g -= dg;
    hi.g += dg;
    const std::vector<double> grid = {t};
    const double x_hi = evolve_moments(init, hi, n, grid)[0].ex;
    const double x_lo = evolve_moments(init, lo, n, grid)[0].ex;
    return (x_hi - x_lo) / (2.0 * dg);
}

} // namespace

TEST_CASE("moment_rhs matches the printed system") {
    const ModelParams m = model(0.96);
    const double delta = m.gap();

    SUBCASE("kappa=0: d<X>/dt = omega <P>") {
        MomentVector mv;
        mv.ep = 0.37;
        mv.exx = 1.2;
        mv.epp = 0.8;
        mv.eg = 0.1;
        const MomentVector d = moment_rhs(mv, m, noise(0.0));
        CHECK(d.ex == doctest::Approx(0.37).epsilon(1e-15));
        CHECK(d.ep == doctest::Approx(-0.25 * delta * mv.ex).epsilon(1e-15));
    }

    SUBCASE("stationary point has vanishing second-moment derivatives") {
        const NoiseParams n = noise(0.05, 0.0);
        const MomentVector st = stationary_moments(m, n);
        const MomentVector d = moment_rhs(st, m, n);
        CHECK(std::abs(d.exx) <= 1e-12);
        CHECK(std::abs(d.epp) <= 1e-12);
        CHECK(std::abs(d.eg) <= 1e-12);
    }

    SUBCASE("formal gamma_a = gamma_h: damping vanishes, pumping survives") {
        MomentVector mv;
        mv.exx = 2.0;
        mv.epp = 1.0;
        mv.eg = 0.4;
        const double gamma = 0.3;
        const MomentVector d = moment_rhs_rates(mv, 1.0, delta, gamma, gamma);
        CHECK(d.exx == doctest::Approx(1.0 * mv.eg + gamma).epsilon(1e-15));
        CHECK(d.epp == doctest::Approx(-0.25 * delta * mv.eg + gamma).epsilon(1e-15));
        CHECK(d.eg == doctest::Approx(2.0 * mv.epp - 0.5 * delta * mv.exx).epsilon(1e-15));
    }

    SUBCASE("two-photon kind rejected") {
        NoiseParams n = noise(0.05);
        n.kind = RelaxationKind::TwoPhoton;
        CHECK_THROWS_AS(moment_rhs(MomentVector{}, m, n), ClosureViolation);
        CHECK_THROWS_AS(stationary_moments(m, n), ClosureViolation);
    }
}

TEST_CASE("evolve_moments closed form") {
    const ModelParams m = model(0.96);
    const InitialConditions init = standard_init();
    const double delta = m.gap();

    SUBCASE("t=0 returns the initial conditions exactly") {
        const auto out = evolve_moments(init, m, noise(0.03, 1.0), {0.0});
        CHECK(out[0].ex == doctest::Approx(init.x0));
        CHECK(out[0].ep == doctest::Approx(init.p0));
        CHECK(out[0].exx == doctest::Approx(1.0));
        CHECK(out[0].epp == doctest::Approx(1.0));
        CHECK(out[0].eg == doctest::Approx(0.0));
    }

    SUBCASE("kappa=0 first moment oscillates at sqrt(Delta) omega / 2") {
        std::vector<double> grid;
        for (int i = 0; i <= 50; ++i) {
            grid.push_back(0.5 * i);
        }
        const auto out = evolve_moments(init, m, noise(0.0), grid);
        const double omega_osc = 0.5 * std::sqrt(delta);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expected = init.x0 * std::cos(omega_osc * grid[i]) +
                                    (2.0 / std::sqrt(delta)) * init.p0 *
                                        std::sin(omega_osc * grid[i]);
            CHECK(out[i].ex == doctest::Approx(expected).epsilon(1e-10));
        }
    }

    SUBCASE("kappa>0 first moments decay with envelope exp(-kappa t / 2)") {
        const double kappa = 0.04;
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) {
            grid.push_back(2.0 * i);
        }
        const auto out = evolve_moments(init, m, noise(kappa), grid);
        const auto free = evolve_moments(init, m, noise(0.0), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double env = std::exp(-0.5 * kappa * grid[i]);
            CHECK(out[i].ex == doctest::Approx(free[i].ex * env).epsilon(1e-9));
            CHECK(out[i].ep == doctest::Approx(free[i].ep * env).epsilon(1e-9));
        }
    }

    SUBCASE("matches an adaptive RK integration of moment_rhs to 1e-10") {
        const NoiseParams n = noise(0.05, 2.0);
        using Vec5 = Eigen::Matrix<double, 5, 1>;
        const MomentVector raw = init.raw();
        Vec5 y;
        y << raw.ex, raw.ep, raw.exx, raw.epp, raw.eg;
        Rk45Options opt;
        opt.rel_tol = 1e-12;
        opt.abs_tol = 1e-14;
        Rk45<Vec5> stepper(opt);
        auto rhs = [&](double, const Vec5& v, Vec5& out) {
            MomentVector mv{v(0), v(1), v(2), v(3), v(4)};
            const MomentVector d = moment_rhs(mv, m, n);
            out << d.ex, d.ep, d.exx, d.epp, d.eg;
        };
        auto post = [](double, Vec5&) {};
        double t = 0.0;
        std::vector<double> grid = {0.0, 3.7, 11.0, 25.0, 60.0};
        const auto exact = evolve_moments(init, m, n, grid);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            stepper.integrate_to(rhs, post, y, t, grid[i]);
            CHECK(std::abs(y(0) - exact[i].ex) <= 1e-10);
            CHECK(std::abs(y(1) - exact[i].ep) <= 1e-10);
            CHECK(std::abs(y(2) - exact[i].exx) <= 1e-10);
            CHECK(std::abs(y(3) - exact[i].epp) <= 1e-10);
            CHECK(std::abs(y(4) - exact[i].eg) <= 1e-10);
        }
    }
}

TEST_CASE("analytic F_g formula") {
    const ModelParams m = model(0.96);
    const InitialConditions init = standard_init();
    const double delta = m.gap();

    SUBCASE("F_g(0) = 0") {
        CHECK(analytic_fg(0.0, m, noise(0.02, 1.0), init) == doctest::Approx(0.0));
    }

    SUBCASE("noise-free maxima reproduce the closed form") {
        for (int mm = 1; mm <= 3; ++mm) {
            const NoiseFreeMax nm = noise_free_max(m, mm, init);
            const double expected = 8.0 * m.g * m.g * nm.tau * nm.tau / (delta * delta);
            CHECK(nm.fg == doctest::Approx(expected).epsilon(1e-12));
            CHECK(analytic_fg(nm.tau, m, noise(0.0), init) ==
                  doctest::Approx(expected).epsilon(1e-9));
        }
    }

    SUBCASE("gap guard") {
        ModelParams crit = m;
        crit.g = 0.9999999999999;
        CHECK_THROWS_AS(analytic_fg(1.0, crit, noise(0.01), init), GapTooSmall);
        CHECK_THROWS_AS(noise_free_max(crit, 1, init), GapTooSmall);
    }

    SUBCASE("equals chi^2 / Var(X) built from the exact moments") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> ug(0.9, 0.98);
        std::uniform_real_distribution<double> uk(0.0, 0.05);
        std::uniform_real_distribution<double> ut(0.5, 80.0);
        std::uniform_int_distribution<int> un(0, 2);
        for (int trial = 0; trial < 40; ++trial) {
            const ModelParams mm = model(ug(rng));
            const NoiseParams nn = noise(uk(rng), un(rng));
            const double t = ut(rng);
            const auto ms = evolve_moments(init, mm, nn, {t});
            const double chi = chi_from_moments(t, mm, nn, init, 1e-5);
            const double reference = chi * chi / ms[0].var_x();
            const double formula = analytic_fg(t, mm, nn, init);
            CAPTURE(mm.g);
            CAPTURE(nn.kappa);
            CAPTURE(t);
            CHECK(formula == doctest::Approx(reference).epsilon(2e-5));
        }
    }
}

// Term-level checks of the printed A(t), B(t), C(t) factors against the
// evolved moments: chi relates to A, the kappa=0 variance to B, and the
// denominator identity 4 Delta e^{kappa t} Var(X) = B + (2nbar+1) C / (...)
// isolates C.
TEST_CASE("A, B, C factors against the moment solution") {
    const InitialConditions init = standard_init();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ut(1.0, 40.0);

    const ModelParams m = model(0.95);
    const double delta = m.gap();
    const double sd = std::sqrt(delta);

    auto a_term = [&](double t) {
        return (delta * t * init.x0 + 4.0 * init.p0) * std::sin(0.5 * sd * t) -
               2.0 * sd * t * init.p0 * std::cos(0.5 * sd * t);
    };
    auto b_term = [&](double t) {
        return 2.0 * delta * (1.0 + std::cos(sd * t)) * init.var_x0 +
               8.0 * (1.0 - std::cos(sd * t)) * init.var_p0 +
               8.0 * sd * std::sin(sd * t) * init.cov_re0;
    };

    SUBCASE("A(t) via the sensitivity chi = e^{-kt/2} 2g Delta^{-3/2} A") {
        const NoiseParams n = noise(0.03, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double t = ut(rng);
            const double chi = chi_from_moments(t, m, n, init, 1e-5);
            const double predicted = std::exp(-0.5 * n.kappa * t) * 2.0 * m.g *
                                     std::pow(delta, -1.5) * a_term(t);
            CHECK(chi == doctest::Approx(predicted).epsilon(1e-5));
        }
    }

    SUBCASE("B(t) = 4 Delta Var(X)(t) at kappa = 0") {
        for (int trial = 0; trial < 5; ++trial) {
            const double t = ut(rng);
            const auto ms = evolve_moments(init, m, noise(0.0), {t});
            CHECK(b_term(t) == doctest::Approx(4.0 * delta * ms[0].var_x()).epsilon(1e-9));
        }
    }

    SUBCASE("C(t) from the denominator identity") {
        const NoiseParams n = noise(0.04, 0.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double t = ut(rng);
            const auto ms = evolve_moments(init, m, n, {t});
            const double c_printed =
                delta * (delta + 4.0 + 2.0 * n.kappa * n.kappa) * std::expm1(n.kappa * t) -
                (4.0 - delta) * (n.kappa * n.kappa * (1.0 - std::cos(sd * t)) +
                                 sd * n.kappa * std::sin(sd * t));
            const double c_from_moments =
                (delta + n.kappa * n.kappa) *
                (4.0 * delta * std::exp(n.kappa * t) * ms[0].var_x() - b_term(t));
            CHECK(c_printed == doctest::Approx(c_from_moments).epsilon(1e-8));
        }
    }
}

TEST_CASE("noise_free_max scaling in m") {
    const ModelParams m = model(0.96);
    const InitialConditions init = standard_init();
    const NoiseFreeMax m1 = noise_free_max(m, 1, init);
    const NoiseFreeMax m2 = noise_free_max(m, 2, init);
    CHECK(m2.tau == doctest::Approx(2.0 * m1.tau).epsilon(1e-14));
    CHECK(m2.fg == doctest::Approx(4.0 * m1.fg).epsilon(1e-14));
    CHECK(m1.tau == doctest::Approx(2.0 * M_PI / std::sqrt(0.3136)).epsilon(1e-12));
}

TEST_CASE("stationary moments") {
    SUBCASE("g=0: equipartition near 1/2 with O(kappa/omega) corrections") {
        const MomentVector st = stationary_moments(model(0.0), noise(0.01, 0.0));
        CHECK(st.exx == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(st.epp == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(std::abs(st.eg) <= 0.01);
    }

    SUBCASE("stationary <X^2> is affine in 2 nbar + 1") {
        const ModelParams m = model(0.95);
        const double k = 0.03;
        const double v0 = stationary_moments(m, noise(k, 0.0)).exx;
        const double v1 = stationary_moments(m, noise(k, 1.0)).exx;
        const double v2 = stationary_moments(m, noise(k, 2.0)).exx;
        // v(nbar) = v0 * (2 nbar + 1) exactly.
        CHECK(v1 == doctest::Approx(3.0 * v0).epsilon(1e-12));
        CHECK(v2 == doctest::Approx(5.0 * v0).epsilon(1e-12));
    }

    SUBCASE("kappa=0 rejected") {
        CHECK_THROWS_AS(stationary_moments(model(0.9), noise(0.0)), InvalidParameter);
    }
}
