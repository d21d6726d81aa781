#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vpgap/kurth.hpp"
#include "vpgap/mathur.hpp"
#include "vpgap/orbits_planar.hpp"
#include "vpgap/orbits_radial.hpp"
#include "vpgap/scaling.hpp"
#include "vpgap/spectrum.hpp"

using namespace vpgap;

namespace {

int failures = 0;

/// prints one verdict line per criterion
void report(int id, bool ok, const std::string& what, const std::string& detail,
            std::chrono::steady_clock::time_point start)
{
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), sec);
    std::fflush(stdout);
    if(!ok) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, double(args)...);
    return buf;
}

const RadialSteadyState& shell()
{
    static const RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 0.5, -0.5, 0.1, 1});
    return s;
}

const PlanarSteadyState& planar_king()
{
    static const PlanarSteadyState s = solve_planar(PlanarAnsatz{PlanarKind::King, 1, 1});
    return s;
}

const PlanarSteadyState& planar_poly(double k)
{
    static const PlanarSteadyState p1 = solve_planar(PlanarAnsatz{PlanarKind::Polytrope, 1, 1});
    static const PlanarSteadyState p075 = solve_planar(PlanarAnsatz{PlanarKind::Polytrope, 0.75, 1});
    return k == 1 ? p1 : p075;
}

/// root of r m0(r) = L by bisection
double circular_radius_oracle(const RadialSteadyState& s, double L)
{
    double lo = s.inner_radius() + 1e-14, hi = 10 * s.R0();
    for(int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid * s.m(mid) < L ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double clock_period(const RadialSteadyState& s, double E, double L)
{
    double rl = circular_radius_oracle(s, L);
    double w0 = std::sqrt(2 * (E - L / (2 * rl * rl) - s.U(rl)));
    auto force = [&](double r) { return -(s.m(r) / (r * r) - L / (r * r * r)); };
    double guess = std::min(period_upper_bound(s, E, L), 2 * M_PI / std::sqrt(4 * M_PI * s.rho_max()));
    return oracle::ode_clock(force, rl, w0, guess / 20000);
}

double clock_period(const PlanarSteadyState& s, double Ebar, double T_guess)
{
    double w0 = std::sqrt(2 * (Ebar - s.U_center()));
    auto force = [&](double x) { return -s.dU(x); };
    return oracle::ode_clock(force, 0, w0, 2 * T_guess / 20000);
}

/// scans are kept for the structural checks
std::vector<MathurScan> all_scans;

bool scan_is_monotone(const MathurScan& s)
{
    for(Eigen::Index i = 0; i < s.M.size(); ++i) {
        if(!(s.M[i] >= 0)) return false;
        if(i > 0 && s.M[i] < s.M[i - 1]) return false;
    }
    return true;
}

Discretization refined(Discretization d, bool radial)
{
    d.n_r *= 2;
    d.n_E *= 2;
    d.K_max *= 2;
    if(radial) d.n_L *= 2;
    return d;
}

void criterion_1()
{
    auto t0 = std::chrono::steady_clock::now();
    RadialSteadyState k = kurth_radial_state();
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    double worst = 0;
    for(int n = 0; n < 50; ++n) {
        double L = U(gen) * max_angular_momentum(k);
        double lo = minimal_energy(k, L), hi = effective_potential(k, k.R0(), L);
        double E = lo + U(gen) * (hi - lo);
        worst = std::max(worst, std::fabs(period(k, E, L) - M_PI));
    }
    report(1, worst < 1e-6, "Kurth radial period", fmt("max |T - pi| = %.2e over 50 orbits", worst), t0);
}

void criterion_2()
{
    auto t0 = std::chrono::steady_clock::now();
    PlanarSteadyState k = kurth_planar_state();
    std::mt19937 gen(2);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    double worst_T = 0, worst_d = 0;
    for(int n = 0; n < 20; ++n) {
        double E = k.U_center() + U(gen) * (k.E0bar() - k.U_center());
        worst_T = std::max(worst_T, std::fabs(period_planar(k, E) - 2 * M_PI));
        worst_d = std::max(worst_d, std::fabs(period_derivative_planar(k, E)));
    }
    report(2, worst_T < 1e-6 && worst_d < 1e-6, "planar Kurth period",
           fmt("max |T - 2 pi| = %.2e, max |T'| = %.2e over 20 energies", worst_T, worst_d), t0);
}

void criterion_3()
{
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    using Named = std::pair<std::string, const PlanarSteadyState*>;
    for(auto [name, s] : {Named{"King", &planar_king()}, Named{"polytrope k=1", &planar_poly(1)}}) {
        // T = T0 + c d + O(d^2) in the depth d above the well bottom
        double d = 1e-4 * s->E0bar() - 1e-4 * s->U_center();
        double T1 = period_planar(*s, s->U_center() + d), T2 = period_planar(*s, s->U_center() + d / 2);
        double limit = 2 * T2 - T1, expected = std::sqrt(M_PI / s->rho0()[0]);
        double err = std::fabs(limit / expected - 1);
        ok = ok && err < 1e-4;
        detail += name + fmt(" rel err %.2e; ", err);
    }
    report(3, ok, "planar central-period limit", detail, t0);
}

void criterion_4()
{
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double worst = 0;
    int negative = 0;
    for(const PlanarSteadyState* s : {&planar_king(), &planar_poly(0.75), &planar_poly(1)}) {
        auto table = planar_orbit_table(*s, 50);
        double h = 1e-5 * (s->E0bar() - s->U_center());
        for(std::size_t i = 0; i < table.size(); ++i) {
            const auto& o = table[i];
            if(!(o.Tprime > 0)) ++negative;
            double fd = i + 1 < table.size()
                ? (period_planar(*s, o.Ebar + h) - period_planar(*s, o.Ebar - h)) / (2 * h)
                : (3 * o.T - 4 * period_planar(*s, o.Ebar - h) + period_planar(*s, o.Ebar - 2 * h)) / (2 * h);
            worst = std::max(worst, std::fabs(o.Tprime / fd - 1));
        }
    }
    ok = negative == 0 && worst < 1e-3;
    report(4, ok, "planar monotonicity",
           fmt("%.0f nonpositive T' of 150; max rel |T' - FD| = %.2e", negative, worst), t0);
}

void criterion_5()
{
    auto t0 = std::chrono::steady_clock::now();
    auto extrapolate = [](KurthGeometry g) {
        // P = P0 + c gamma^2 + O(gamma^4)
        double a = kurth_period(g, 1e-2).P, b = kurth_period(g, 1e-3).P;
        return b + (b - a) / 99;
    };
    double es = std::fabs(extrapolate(KurthGeometry::Spherical) - 2 * M_PI);
    double ep = std::fabs(extrapolate(KurthGeometry::Planar) - 2 * M_PI / std::sqrt(3.0));
    double P06 = kurth_period(KurthGeometry::Spherical, 0.6).P;
    double clock = oracle::ode_clock([](double R) { return 1 / (R * R * R) - 1 / (R * R); }, 1.0, 0.6, 1e-4);
    bool ok = es < 1e-4 && ep < 1e-4 && std::fabs(P06 - 12.272) < 1e-3 && std::fabs(P06 - clock) < 1e-3;
    report(5, ok, "Kurth envelope limits",
           fmt("|P0 - 2pi| = %.1e, |P0 - 2pi/sqrt3| = %.1e, P(0.6) = %.6f, clock %.6f", es, ep, P06, clock), t0);
}

void criterion_6()
{
    auto t0 = std::chrono::steady_clock::now();
    const RadialSteadyState& s = shell();
    PeriodSurface p = period_surface(s, 20, 20);
    double rho_max = s.rho0().maxCoeff();
    int violations = 0;
    double upper_margin = HUGE_VAL, lower_margin = HUGE_VAL;
    for(int i = 0; i < 20; ++i)
        for(int j = 0; j < 20; ++j) {
            double E = p.E(i, j), L = p.L(i, j), T = p.T(i, j);
            double rl = circular_radius_oracle(s, L);
            double up = 2 * M_PI * s.M0() * s.M0() / (E * E * std::sqrt(L));
            double lo = 1 / std::sqrt(4 * M_PI * rho_max + 3 * L / std::pow(rl, 4));
            if(!(T <= up && T >= lo)) ++violations;
            upper_margin = std::min(upper_margin, up / T);
            lower_margin = std::min(lower_margin, T / lo);
        }
    report(6, violations == 0, "period bounds on the shell",
           fmt("%.0f violations on 400 cells; min up/T = %.3f, min T/low = %.3f", violations, upper_margin,
               lower_margin),
           t0);
}

void criterion_7()
{
    auto t0 = std::chrono::steady_clock::now();
    RadialSteadyState s = solve_radial(RadialAnsatz{RadialKind::Polytrope, 1, 0, 0, 1});
    double v = limit_L_over_rL4(s), expected = 4 * M_PI / 3 * s.rho0()[0];
    double err = std::fabs(v / expected - 1);
    report(7, err < 1e-2, "limit of L / r_L^4", fmt("%.8f vs %.8f, rel err %.2e", v, expected, err), t0);
}

void criterion_8()
{
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> U(0, 1);
    int mismatches = 0;
    for(int n = 0; n < 200; ++n) {
        double a = 0.5 + 2 * U(gen), b = a * (1 + 2 * std::pow(10.0, -3 * U(gen)));
        GapCount g = gap_count(a, b);
        for(SpectrumMode m : {SpectrumMode::RadialFull, SpectrumMode::RadialOdd, SpectrumMode::PlanarOddOdd})
            if(!(count_gaps(essential_spectrum(a, b, m, 100000)) == g)) ++mismatches;
    }
    KurthGapReport sph = kurth_gap_position(KurthGeometry::Spherical);
    KurthGapReport pl = kurth_gap_position(KurthGeometry::Planar);
    bool verdicts = sph.placements.size() == 1 && sph.placements[0].inside && pl.placements.size() == 2
        && pl.placements[0].mode == SpectrumMode::PlanarOddOdd && pl.placements[0].inside
        && pl.placements[1].mode == SpectrumMode::PlanarOdd && !pl.placements[1].inside;
    report(8, mismatches == 0 && verdicts, "spectrum structure",
           fmt("%.0f gap count mismatches of 600; Kurth verdicts spherical inside, planar odd-odd inside, "
               "planar odd outside: ",
               mismatches)
               + (verdicts ? "yes" : "no"),
           t0);
}

struct PlanarRun {
    MathurScan coarse, fine;
    double gap_top = 0;
};

PlanarRun planar_run(const PlanarSteadyState& s)
{
    PlanarRun r;
    Discretization d;
    r.coarse = scan(mathur_tables_planar(s, d));
    r.fine = scan(mathur_tables_planar(s, refined(d, false)));
    double T = period_planar(s, s.E0bar());
    r.gap_top = 16 * M_PI * M_PI / (T * T);
    all_scans.push_back(r.coarse);
    all_scans.push_back(r.fine);
    return r;
}

MathurTables shell_tables;
MathurScan shell_coarse, shell_fine;

void criterion_10()
{
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for(auto [name, s] : {std::pair{"King", &planar_king()}, std::pair{"polytrope k=0.75", &planar_poly(0.75)}}) {
        PlanarRun r = planar_run(*s);
        bool found = r.coarse.eigenvalue && r.fine.eigenvalue;
        double lam = found ? *r.coarse.eigenvalue : NAN;
        double change = found ? std::fabs(*r.fine.eigenvalue / lam - 1) : NAN;
        double miss = std::max(std::fabs(r.coarse.M_at_eigenvalue - 1), std::fabs(r.fine.M_at_eigenvalue - 1));
        ok = ok && found && lam > 0 && lam < r.gap_top && *r.fine.eigenvalue < r.gap_top && miss < 1e-3
            && change < 1e-3;
        detail += std::string(name) + fmt(" lambda* = %.6f in (0, %.4f), |M - 1| = %.1e, refinement %.1e; ", lam,
                                          r.gap_top, miss, change);
    }
    report(10, ok, "planar eigenvalue detection", detail, t0);
}

void criterion_11()
{
    auto t0 = std::chrono::steady_clock::now();
    PeriodSurface p = period_surface(shell(), 20, 20);
    bool shape = p.monotone_E && p.monotone_L && p.argmax_at_corner;
    Discretization d;
    shell_tables = mathur_tables_radial(shell(), p.T_sup, d);
    shell_coarse = scan(shell_tables);
    shell_fine = scan(mathur_tables_radial(shell(), p.T_sup, refined(d, true)));
    all_scans.push_back(shell_coarse);
    all_scans.push_back(shell_fine);
    bool found = shell_coarse.eigenvalue && shell_fine.eigenvalue;
    double lam = found ? *shell_coarse.eigenvalue : NAN;
    double change = found ? std::fabs(*shell_fine.eigenvalue / lam - 1) : NAN;
    double P = 2 * M_PI / std::sqrt(lam), top = 4 * M_PI * M_PI / (p.T_sup * p.T_sup);
    bool ok = shape && found && lam > 0 && lam < top && change < 1e-2 && P > p.T_sup;
    report(11, ok, "radial eigenvalue detection",
           fmt("lambda* = %.6f in (0, %.4f), refinement %.1e, P = %.5f > T_sup = %.5f", lam, top, change, P,
               p.T_sup)
               + (shape ? "; monotone in E and L, maximum at the corner" : "; surface shape check failed"),
           t0);
}

void criterion_9()
{
    auto t0 = std::chrono::steady_clock::now();
    double sym = 0;
    MathurTables king = mathur_tables_planar(planar_king(), Discretization{});
    for(const MathurTables* t : {&king, &shell_tables})
        for(double f : {0.1, 0.5, 0.9, 0.999}) sym = std::max(sym, symmetry_residual(assemble_form(*t, f * t->gap_top).A));
    int bad_scans = 0;
    for(const auto& s : all_scans)
        if(!scan_is_monotone(s)) ++bad_scans;
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> U(shell().inner_radius(), shell().R0());
    double lam = 0.5 * shell_tables.gap_top, kernel = 0;
    for(int i = 0; i < 10; ++i) {
        double r = U(gen), sg = U(gen);
        double a = r * r * kernel_radial(shell(), lam, r, sg, shell_tables.K);
        double b = sg * sg * kernel_radial(shell(), lam, sg, r, shell_tables.K);
        kernel = std::max(kernel, std::fabs(a - b) / std::max(std::fabs(a), 1e-300));
    }
    bool ok = sym < 1e-10 && bad_scans == 0 && !all_scans.empty() && kernel < 1e-8;
    report(9, ok, "Mathur form sanity",
           fmt("symmetry residual %.1e; %.0f of %.0f scans violate M >= 0 or monotonicity; kernel asymmetry %.1e",
               sym, bad_scans, double(all_scans.size()), kernel),
           t0);
}

void criterion_12()
{
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    MathurTables king = mathur_tables_planar(planar_king(), Discretization{});
    for(auto [name, t] : {std::pair{"King", &king}, std::pair{"shell", &shell_tables}}) {
        auto probe = divergence_probe(*t, {1e-1, 1e-2, 1e-3});
        ok = ok && probe[1].second > probe[0].second && probe[2].second > probe[1].second;
        detail += std::string(name)
            + fmt(" M = %.4f, %.4f, %.4f; ", probe[0].second, probe[1].second, probe[2].second);
    }
    report(12, ok, "divergence probe", detail, t0);
}

void criterion_13()
{
    auto t0 = std::chrono::steady_clock::now();
    EddingtonOptions iso;
    iso.mathur = true;
    EddingtonTable a = eddington_ritter_check(1, 0, 0, 1, {1, 2, 4}, iso);
    EddingtonTable b = eddington_ritter_check(0.5, -0.5, 0.1, 1, {1, 2, 4});
    bool found = true;
    for(const auto& r : a.rows) found = found && r.lambda_star.has_value();
    bool ok = a.spread_T < 1e-2 && b.spread_T < 1e-2 && (!found || a.spread_rho < 2e-2);
    report(13, ok, "Eddington-Ritter scaling",
           fmt("spread T_sup y0^p: %.1e (k=1, l=0), %.1e (shell); spread P rho0^1/2: %.1e", a.spread_T, b.spread_T,
               found ? a.spread_rho : NAN)
               + (found ? "" : " (no eigenvalue found)"),
           t0);
}

void criterion_14()
{
    auto t0 = std::chrono::steady_clock::now();
    const RadialSteadyState& s = shell();
    std::mt19937 gen(14);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    double Lmax = max_angular_momentum(s), worst = 0;
    for(int n = 0; n < 10; ++n) {
        double L = s.L0() + U(gen) * (Lmax - s.L0()), lo = minimal_energy(s, L);
        double E = lo + U(gen) * (s.E0() - lo);
        worst = std::max(worst, std::fabs(period(s, E, L) / clock_period(s, E, L) - 1));
    }
    const PlanarSteadyState& k = planar_king();
    for(int n = 0; n < 10; ++n) {
        double E = k.U_center() + U(gen) * (k.E0bar() - k.U_center());
        double T = period_planar(k, E);
        worst = std::max(worst, std::fabs(T / clock_period(k, E, T) - 1));
    }
    MathurTables t = mathur_tables_planar(k, Discretization{.n_r = 96});
    double lam = 0.5 * t.gap_top;
    double sos = m_lambda(assemble_form(t, lam)).M;
    double nys = nystrom_planar(k, lam);
    double diff = std::fabs(nys / sos - 1);
    report(14, worst < 1e-4 && diff < 1e-3, "oracle equivalence",
           fmt("max rel |T - clock| = %.1e over 20 orbits; Nystrom %.6f vs sum of squares %.6f, rel %.1e", worst,
               nys, sos, diff),
           t0);
}

}  // namespace

int main()
{
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_10();
    criterion_11();
    criterion_9();
    criterion_12();
    criterion_13();
    criterion_14();
    std::printf("%d of 14 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
