#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qrm/metrology.hpp"

using namespace qrm;

namespace {

ModelParams model(double g) {
    ModelParams m;
    m.g = g;
    m.trunc_dim = 60;
    return m;
}

NoiseParams single(double kappa, double nbar = 0.0) {
    NoiseParams n;
    n.kappa = kappa;
    n.nbar = nbar;
    return n;
}

InitialConditions standard_init() {
    InitialConditions init;
    init.p0 = 1.0 / std::sqrt(2.0);
    init.var_x0 = 1.0;
    init.var_p0 = 0.5;
    return init;
}

// Trajectory stub carrying exact moments (the closure is exact, so this is a
// legitimate stand-in for the master equation on metrology's grid contracts).
Trajectory moments_trajectory(double g, const NoiseParams& noise,
                              const std::vector<double>& grid) {
    Trajectory traj;
    traj.times = grid;
    traj.moments = evolve_moments(standard_init(), model(g), noise, grid);
    traj.diagnostics.resize(grid.size());
    return traj;
}

std::vector<double> uniform_grid(double t_max, int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = t_max * i / (n - 1);
    }
    return grid;
}

} // namespace

TEST_CASE("chi_g central difference against the closed-form derivative") {
    const double g = 0.96, dg = 1e-4;
    const NoiseParams noise = single(0.0);
    const auto grid = uniform_grid(40.0, 400);
    const Trajectory minus = moments_trajectory(g - dg, noise, grid);
    const Trajectory zero = moments_trajectory(g, noise, grid);
    const Trajectory plus = moments_trajectory(g + dg, noise, grid);
    const auto chi = chi_g(minus, zero, plus, dg);

    CHECK(chi[0] == doctest::Approx(0.0));

    const double delta = delta_gap(g);
    const double sd = std::sqrt(delta);
    const InitialConditions init = standard_init();
    for (std::size_t i = 0; i < grid.size(); i += 17) {
        const double t = grid[i];
        const double a_t = (delta * t * init.x0 + 4.0 * init.p0) * std::sin(0.5 * sd * t) -
                           2.0 * sd * t * init.p0 * std::cos(0.5 * sd * t);
        const double exact = 2.0 * g * std::pow(delta, -1.5) * a_t;
        CHECK(std::abs(chi[i] - exact) <= std::max(1e-6, 10.0 * dg * dg * std::abs(exact)));
    }
}

TEST_CASE("chi_g Richardson halving consistency") {
    const double g = 0.96;
    const NoiseParams noise = single(0.02);
    const auto grid = uniform_grid(30.0, 200);
    auto chi_at = [&](double dg) {
        return chi_g(moments_trajectory(g - dg, noise, grid), moments_trajectory(g, noise, grid),
                     moments_trajectory(g + dg, noise, grid), dg);
    };
    const auto c1 = chi_at(1e-3);
    const auto c2 = chi_at(5e-4);
    const auto c3 = chi_at(2.5e-4);
    for (std::size_t i = 20; i < grid.size(); i += 31) {
        const double d1 = std::abs(c1[i] - c2[i]);
        const double d2 = std::abs(c3[i] - c2[i]);
        // Second-order differences shrink 4x per halving.
        CHECK(d1 <= 6.0 * d2 + 1e-12);
    }
}

TEST_CASE("chi_g grid mismatch is rejected") {
    const NoiseParams noise = single(0.02);
    const Trajectory a = moments_trajectory(0.95, noise, uniform_grid(10.0, 50));
    const Trajectory b = moments_trajectory(0.95, noise, uniform_grid(10.0, 60));
    CHECK_THROWS_AS(chi_g(a, a, b, 1e-4), DimensionMismatch);
}

TEST_CASE("inverted_variance") {
    SUBCASE("elementwise ratio and F(0)=0") {
        const std::vector<double> times = {0.0, 1.0, 2.0};
        const std::vector<double> chi = {0.0, 3.0, -2.0};
        const std::vector<double> var = {1.0, 4.0, 0.5};
        const FgSeries s = inverted_variance(times, chi, var);
        CHECK(s.fg[0] == 0.0);
        CHECK(s.fg[1] == doctest::Approx(9.0 / 4.0));
        CHECK(s.fg[2] == doctest::Approx(8.0));
        for (std::size_t i = 0; i < s.fg.size(); ++i) {
            CHECK(s.fg[i] >= 0.0);
            CHECK(s.fg[i] * s.var_x[i] == doctest::Approx(s.chi[i] * s.chi[i]).epsilon(1e-12));
        }
    }

    SUBCASE("nonpositive variance rejected") {
        CHECK_THROWS_AS(inverted_variance({0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}),
                        NonpositiveVariance);
    }
}

TEST_CASE("max_inverted_variance on the calculus oracle t^2 exp(-kt)") {
    const double kappa = 0.04;
    FgSeries series;
    const int n = 2000;
    const double t_max = 8.0 / kappa;
    for (int i = 0; i < n; ++i) {
        const double t = t_max * i / (n - 1);
        series.times.push_back(t);
        series.chi.push_back(t * std::exp(-0.5 * kappa * t));
        series.var_x.push_back(1.0);
        series.fg.push_back(t * t * std::exp(-kappa * t));
    }
    const MaxResult max = max_inverted_variance(series);
    const double t_exact = 2.0 / kappa;
    const double dt = series.times[1] - series.times[0];
    CHECK(std::abs(max.t_star - t_exact) <= dt);
    CHECK(max.fg_max >= *std::max_element(series.fg.begin(), series.fg.end()));
    CHECK(max.refined);

    SUBCASE("grid refinement x2 moves the result by less than 0.1%") {
        FgSeries fine;
        for (int i = 0; i < 2 * n; ++i) {
            const double t = t_max * i / (2 * n - 1);
            fine.times.push_back(t);
            fine.chi.push_back(0.0);
            fine.var_x.push_back(1.0);
            fine.fg.push_back(t * t * std::exp(-kappa * t));
        }
        const MaxResult max2 = max_inverted_variance(fine);
        CHECK(std::abs(max2.fg_max - max.fg_max) / max.fg_max <= 1e-3);
    }
}

TEST_CASE("diverging noise-free series peaks at the boundary") {
    FgSeries series;
    for (int i = 0; i < 500; ++i) {
        const double t = 0.1 * i;
        series.times.push_back(t);
        series.chi.push_back(t);
        series.var_x.push_back(1.0);
        series.fg.push_back(t * t);
    }
    CHECK_THROWS_AS(max_inverted_variance(series), PeakAtBoundary);
}

TEST_CASE("noise-free local maxima grow as m^2") {
    const ModelParams m = model(0.96);
    const NoiseParams free = single(0.0);
    const InitialConditions init = standard_init();
    const auto grid = uniform_grid(3.49 * 2.0 * M_PI / std::sqrt(m.gap()), 6000);
    std::vector<double> fg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        fg[i] = analytic_fg(grid[i], m, free, init);
    }
    const auto peaks = local_maxima(grid, fg, 3);
    REQUIRE(peaks.size() == 3);
    for (int mm = 2; mm <= 3; ++mm) {
        const double ratio = peaks[mm - 1].value / peaks[0].value;
        CHECK(ratio == doctest::Approx(mm * mm).epsilon(0.01));
    }
}

TEST_CASE("qfi formula") {
    const ModelParams m = model(0.96);
    const double delta = m.gap();
    const double var_p0 = 0.5;

    CHECK(qfi(m, 0.0, var_p0) == doctest::Approx(0.0));

    SUBCASE("at tau the QFI reduces to 16 g^2 w^2 D^-2 tau^2 Var(P)") {
        for (int mm = 1; mm <= 3; ++mm) {
            const double tau = 2.0 * mm * M_PI / std::sqrt(delta);
            const double expected = 16.0 * m.g * m.g * tau * tau / (delta * delta) * var_p0;
            CHECK(qfi(m, tau, var_p0) == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    SUBCASE("standard state: QFI equals the F_g maxima and so bounds them") {
        const InitialConditions init = standard_init();
        for (int mm = 1; mm <= 4; ++mm) {
            const NoiseFreeMax peak = noise_free_max(m, mm, init);
            const double f = qfi(m, peak.tau, init.var_p0);
            CHECK(f == doctest::Approx(peak.fg).epsilon(1e-12));
            CHECK(f >= peak.fg * (1.0 - 0.01));
        }
    }

    SUBCASE("gap guard") {
        ModelParams crit = m;
        crit.g = 1.0;
        CHECK_THROWS_AS(qfi(crit, 1.0, var_p0), GapTooSmall);
    }
}
