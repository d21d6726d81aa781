#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vpgap/errors.hpp"
#include "vpgap/orbits_radial.hpp"

using namespace vpgap;

namespace {

/// radial period by direct time integration of r'' = -Psi_L'(r) starting at r_L
double clock_period(const RadialSteadyState& s, double E, double L, int steps = 20000)
{
    double lo = s.inner_radius() + 1e-14, hi = 10 * s.R0();
    for(int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid * s.m(mid) < L ? lo : hi) = mid;
    }
    double rl = 0.5 * (lo + hi);
    double w0 = std::sqrt(2 * (E - L / (2 * rl * rl) - s.U(rl)));
    auto force = [&](double r) { return -(s.m(r) / (r * r) - L / (r * r * r)); };
    double guess = period_upper_bound(s, E, L);
    return oracle::ode_clock(force, rl, w0, std::min(guess, 2 * M_PI / std::sqrt(4 * M_PI * s.rho_max())) / steps);
}

}  // namespace

TEST_CASE("Kurth orbit geometry from the closed-form roots")
{
    RadialSteadyState k = kurth_radial_state();
    OrbitRadial o = orbit_geometry(k, -1, 0.16);
    CHECK(o.r_minus == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
    CHECK(o.r_plus == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
    CHECK(o.r_L == doctest::Approx(std::pow(0.16, 0.25)).epsilon(1e-12));
    CHECK(o.r_plus < -k.M0() / o.E);
    CHECK_THROWS_AS(orbit_geometry(k, -1, 0.25), NoOrbitError);
    CHECK_THROWS_AS(orbit_geometry(k, 0.1, 0.25), DomainError);
}

TEST_CASE("turning points solve Psi_L = E")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 1, 0, 0, 1});
    double Lmax = max_angular_momentum(s);
    for(double fl : {0.05, 0.4, 0.9})
        for(double fe : {0.1, 0.5, 0.95}) {
            double L = fl * Lmax, E = minimal_energy(s, L) + fe * (s.E0() - minimal_energy(s, L));
            OrbitRadial o = orbit_geometry(s, E, L);
            CHECK(std::fabs(effective_potential(s, o.r_minus, L) - E) < 1e-10 * std::fabs(E));
            CHECK(std::fabs(effective_potential(s, o.r_plus, L) - E) < 1e-10 * std::fabs(E));
            CHECK(o.r_minus < o.r_L);
            CHECK(o.r_L < o.r_plus);
        }
}

TEST_CASE("Kurth period is pi everywhere")
{
    RadialSteadyState k = kurth_radial_state();
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> U(0.02, 0.98);
    for(int n = 0; n < 20; ++n) {
        double L = U(gen), lo = std::sqrt(L) - 1.5, hi = -1 + L / 2;
        double E = lo + U(gen) * (hi - lo);
        CHECK(period(k, E, L) == doctest::Approx(M_PI).epsilon(1e-10));
    }
}

TEST_CASE("harmonic ball with omega = 2 has radial period pi/2")
{
    RadialSteadyState h = homogeneous_state(3 / M_PI, 0.8);
    for(double L : {0.01, 0.05}) {
        double lo = minimal_energy(h, L), hi = effective_potential(h, 0.8, L);
        for(double f : {0.2, 0.7})
            CHECK(period(h, lo + f * (hi - lo), L) == doctest::Approx(M_PI / 2).epsilon(1e-10));
    }
}

TEST_CASE("polytrope period against the ODE clock")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 1, 0, 0, 1});
    double L = max_angular_momentum(s) / 2, E = s.E0() - 0.1;
    CHECK(period(s, E, L) == doctest::Approx(clock_period(s, E, L)).epsilon(1e-7));

    RadialSteadyState shell = solve_radial(RadialAnsatz{RadialKind::Polytrope, 0.5, -0.5, 0.1, 1});
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    double Lmax = max_angular_momentum(shell);
    for(int n = 0; n < 10; ++n) {
        double Ls = 0.1 + U(gen) * (Lmax - 0.1), lo = minimal_energy(shell, Ls);
        double Es = lo + U(gen) * (shell.E0() - lo);
        CHECK(period(shell, Es, Ls) == doctest::Approx(clock_period(shell, Es, Ls)).epsilon(1e-6));
    }
}

TEST_CASE("theta normalization, monotonicity and the Kurth closed form")
{
    RadialSteadyState k = kurth_radial_state();
    RadialOrbit o(k, -1, 0.16);
    CHECK(o.theta(o.info().r_minus) == doctest::Approx(0).epsilon(1e-14));
    CHECK(o.theta(o.info().r_plus) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(o.theta(std::pow(0.16, 0.25)) == doctest::Approx(std::acos(1.0 / 3) / (2 * M_PI)).epsilon(1e-10));
    CHECK(theta(k, std::pow(0.16, 0.25), -1, 0.16) == doctest::Approx(o.theta(std::pow(0.16, 0.25))));
    CHECK_THROWS_AS(o.theta(0.95), DomainError);

    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::King, 0, 0, 0, 1});
    double L = 0.3 * max_angular_momentum(s), E = 0.5 * (minimal_energy(s, L) + s.E0());
    RadialOrbit p(s, E, L);
    double prev = -1;
    for(int i = 0; i <= 200; ++i) {
        double r = p.info().r_minus + (p.info().r_plus - p.info().r_minus) * i / 200;
        double th = p.theta(r);
        CHECK(th > prev);
        prev = th;
    }
    CHECK(2 * p.T() * p.theta(p.info().r_plus) == doctest::Approx(p.T()));
}

TEST_CASE("Kurth period surface is flat")
{
    RadialSteadyState k = kurth_radial_state();
    PeriodSurface p = period_surface(k, 8, 8);
    CHECK(p.T_sup == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(p.T_inf == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(p.monotone_E);
    CHECK(p.monotone_L);
    std::ostringstream csv;
    write_csv(csv, p);
    CHECK(csv.str().rfind("E,L,T,dT_dE,dT_dL\n", 0) == 0);
}

TEST_CASE("period surface values respect the analytic bounds")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 1, 0, 0, 1});
    PeriodSurface p = period_surface(s, 8, 8);
    for(Eigen::Index i = 0; i < p.T.rows(); ++i)
        for(Eigen::Index j = 0; j < p.T.cols(); ++j) {
            OrbitRadial o = orbit_geometry(s, p.E(i, j), p.L(i, j));
            CHECK(p.T(i, j) <= period_upper_bound(s, o.E, o.L));
            CHECK(p.T(i, j) >= period_lower_bound(s, o));
        }
    CHECK(p.T_sup >= p.T.maxCoeff());
    CHECK(p.T_inf <= p.T.minCoeff());
    CHECK(p.T_inf > 0);
}

TEST_CASE("max-principle bound holds where the density stays above c")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::King, 0, 0, 0, 1});
    double S = 0.3 * s.R0(), c = s.rho(S);
    for(double L : {1e-4, 1e-3}) {
        double lo = minimal_energy(s, L), hi = effective_potential(s, S, L);
        for(double f : {0.1, 0.5, 0.9}) {
            double E = lo + f * (hi - lo);
            if(orbit_geometry(s, E, L).r_plus > S) continue;
            CHECK(period(s, E, L) <= std::sqrt(3 * M_PI / c));
        }
    }
}

TEST_CASE("limit of L / r_L^4")
{
    CHECK(limit_L_over_rL4(kurth_radial_state()) == doctest::Approx(1).epsilon(1e-10));
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 1, 0, 0, 1});
    CHECK(limit_L_over_rL4(s) == doctest::Approx(4 * M_PI / 3 * s.rho_center()).epsilon(1e-2));
    // homogeneous ball: r m(r) = (4 pi rho / 3) r^4 exactly
    RadialSteadyState h = homogeneous_state(0.7, 1.3);
    CHECK(limit_L_over_rL4(h) == doctest::Approx(4 * M_PI / 3 * 0.7).epsilon(1e-10));
    CHECK_THROWS_AS(limit_L_over_rL4(solve_radial(RadialAnsatz{RadialKind::Polytrope, 0.5, -0.5, 0.1, 1})),
                    ParameterError);
}

TEST_CASE("shell surface is monotone with its maximum at the (E0, L0) corner")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 0.5, -0.5, 0.1, 1});
    PeriodSurface p = period_surface(s, 10, 10);
    CHECK(p.monotone_E);
    CHECK(p.monotone_L);
    CHECK(p.argmax_at_corner);
    CHECK(p.argmax_L == doctest::Approx(s.L0()).epsilon(1e-3));
    CHECK(p.T_sup > p.T_inf);
    CHECK(p.T_sup >= p.T_corner);
}

TEST_CASE("mean slope of U0 matches the plain difference away from coincidence")
{
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::King, 0, 0, 0, 1});
    for(double a : {0.01, 0.3, 0.9 * s.R0()})
        for(double b : {0.02, 0.5, 1.5 * s.R0()}) {
            if(a == b) continue;
            CHECK(s.U_mean_slope(a, b) == doctest::Approx((s.U(b) - s.U(a)) / (b - a)).epsilon(1e-9));
        }
    CHECK(s.U_mean_slope(0.4, 0.4) == doctest::Approx(s.dU(0.4)).epsilon(1e-6));
}
