#include "vpgap/orbits_radial.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "vpgap/errors.hpp"
#include "vpgap/format.hpp"

namespace vpgap {

namespace {

double lower_L(const RadialSteadyState& s)
{
    return s.ansatz().kind == RadialKind::Polytrope ? s.L0() : 0.0;
}

}  // namespace

double effective_potential(const RadialSteadyState& s, double r, double L)
{
    return L / (2 * r * r) + s.U(r);
}

double circular_radius(const RadialSteadyState& s, double L)
{
    if(!(L > 0)) throw DomainError("circular_radius: L must be positive");
    if(L >= s.R0() * s.M0()) return L / s.M0();
    double lo = s.inner_radius();
    return brent_root([&](double r) { return r * s.m(r) - L; }, lo, s.R0(), -L,
                      s.R0() * s.M0() - L);
}

OrbitRadial orbit_geometry(const RadialSteadyState& s, double E, double L)
{
    if(!(E < 0)) throw DomainError("orbit_geometry: E >= 0 is unbound");
    if(!(L > 0)) throw DomainError("orbit_geometry: L must be positive");
    OrbitRadial o;
    o.E = E;
    o.L = L;
    o.r_L = circular_radius(s, L);
    double depth = E - effective_potential(s, o.r_L, L);
    if(depth < 1e-8 * std::max(1.0, std::fabs(E)))
        throw NoOrbitError("orbit_geometry: no non-circular orbit at this (E, L)");
    auto f = [&](double r) { return effective_potential(s, r, L) - E; };
    // U0 >= U0(0) gives Psi_L > E below lo
    double lo = 0.5 * std::sqrt(L / (2 * (E - s.U(0))));
    while(f(lo) <= 0) lo *= 0.5;
    o.r_minus = brent_root(f, lo, o.r_L, f(lo), -depth);
    // U0 >= -M0/r gives Psi_L > E at -M0/E
    double hi = -s.M0() / E;
    o.r_plus = brent_root(f, o.r_L, hi, -depth, f(hi));
    return o;
}

RadialOrbit::RadialOrbit(const RadialSteadyState& s, double E, double L, const QuadControl& q)
    : info_(orbit_geometry(s, E, L))
{
    const double rm = info_.r_minus, rp = info_.r_plus;
    c_ = 0.5 * (rp + rm);
    a_ = 0.5 * (rp - rm);
    // with d the distance to the nearer turning point, E - Psi_L = d K(d) where K is a
    // mean slope evaluated without cancellation; h = pi sqrt(a) trig / sqrt(K) is then smooth
    auto K_inner = [&](double r) {
        return -s.U_mean_slope(rm, r) + L * (r + rm) / (2 * r * r * rm * rm);
    };
    auto K_outer = [&](double r) {
        return s.U_mean_slope(r, rp) - L * (rp + r) / (2 * r * r * rp * rp);
    };
    if(!(K_inner(rm) > 0) || !(K_outer(rp) > 0))
        throw NoOrbitError("RadialOrbit: degenerate turning point");
    const double a = a_;
    auto h = [&](double t) {
        double sh = std::sin(0.5 * M_PI * t), ch = std::cos(0.5 * M_PI * t);
        if(t <= 0.5) {
            double d = 2 * a * sh * sh;
            return M_PI * std::sqrt(a) * ch / std::sqrt(K_inner(rm + d));
        }
        double d = 2 * a * ch * ch;
        return M_PI * std::sqrt(a) * sh / std::sqrt(K_outer(rp - d));
    };
    time_ = chebyshev_integrate(h, q);
    info_.T = 2 * time_.total;
}

double RadialOrbit::r_of_s(double s) const
{
    return c_ - a_ * std::cos(M_PI * s);
}

double RadialOrbit::dr_ds(double s) const
{
    return M_PI * a_ * std::sin(M_PI * s);
}

double RadialOrbit::s_of_r(double r) const
{
    if(r <= c_)
        return 2 / M_PI * std::asin(std::sqrt(std::clamp((r - info_.r_minus) / (2 * a_), 0.0, 1.0)));
    return 1 - 2 / M_PI * std::asin(std::sqrt(std::clamp((info_.r_plus - r) / (2 * a_), 0.0, 1.0)));
}

double RadialOrbit::theta(double r) const
{
    if(r < info_.r_minus || r > info_.r_plus)
        throw DomainError("theta: r outside [r_-, r_+]");
    return theta_of_s(s_of_r(r));
}

double period(const RadialSteadyState& s, double E, double L, const QuadControl& q)
{
    return RadialOrbit(s, E, L, q).T();
}

double theta(const RadialSteadyState& s, double r, double E, double L, const QuadControl& q)
{
    return RadialOrbit(s, E, L, q).theta(r);
}

double max_angular_momentum(const RadialSteadyState& s)
{
    if(s.ansatz().kind == RadialKind::Kurth) return 1.0;
    const double E0 = s.E0();
    auto f = [&](double r) { return 2 * r * r * (E0 - s.U(r)); };
    const auto& r = s.r_grid();
    Eigen::Index best = 1;
    for(Eigen::Index i = 1; i < r.size(); ++i)
        if(f(r[i]) > f(r[best])) best = i;
    double lo = r[best - 1], hi = r[std::min<Eigen::Index>(best + 1, r.size() - 1)];
    // golden section on the bracketing cells
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo), f1 = f(x1), f2 = f(x2);
    for(int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        if(f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

double minimal_energy(const RadialSteadyState& s, double L)
{
    return effective_potential(s, circular_radius(s, L), L);
}

double period_upper_bound(const RadialSteadyState& s, double E, double L)
{
    return 2 * M_PI * s.M0() * s.M0() / (E * E * std::sqrt(L));
}

double period_lower_bound(const RadialSteadyState& s, const OrbitRadial& o)
{
    double rl2 = o.r_L * o.r_L;
    return 1 / std::sqrt(4 * M_PI * s.rho_max() + 3 * o.L / (rl2 * rl2));
}

PeriodSurface period_surface(const RadialSteadyState& s, int n_E, int n_L, const SurfaceOptions& opt)
{
    if(n_E < 4 || n_L < 4) throw ParameterError("period_surface: need at least 4x4 cells");
    if(!(opt.margin > 0) || !(opt.margin < 0.25)) throw ParameterError("period_surface: margin in (0, 1/4)");
    const double L0 = lower_L(s), Lmax = max_angular_momentum(s), m = opt.margin;
    if(!(Lmax > L0)) throw DomainError("period_surface: empty support");
    const double dEcut = s.ansatz().kind == RadialKind::Kurth ? 0.5 : 0.0;

    auto L_of = [&](double v) { return L0 + (Lmax - L0) * v; };
    auto E_of = [&](double u, double L) {
        double lo = minimal_energy(s, L);
        return lo + (s.energy_cutoff(L) - lo) * u;
    };
    auto T_at = [&](double u, double v) {
        double L = L_of(v);
        return period(s, E_of(u, L), L, opt.quad);
    };
    // the energy window closes at L_max (quadratically for Kurth); the top L row moves
    // inward until the first E cell clears the near-circular exclusion
    double v_hi = 1 - m;
    auto window = [&](double v) {
        double L = L_of(v);
        return s.energy_cutoff(L) - minimal_energy(s, L);
    };
    while(window(v_hi) * m < 1e-6 * std::fabs(s.E0()) && v_hi > 0.5)
        v_hi = 1 - 2 * (1 - v_hi);
    auto ugrid = [&](int i) { return m + (1 - 2 * m) * i / (n_E - 1); };
    auto vgrid = [&](int j) { return m + (v_hi - m) * j / (n_L - 1); };

    PeriodSurface out;
    out.n_E = n_E;
    out.n_L = n_L;
    out.margin = m;
    out.E.resize(n_E, n_L);
    out.L.resize(n_E, n_L);
    out.T.resize(n_E, n_L);
    out.dT_dE.resize(n_E, n_L);
    out.dT_dL.resize(n_E, n_L);
    std::vector<double> width(n_L), dEdL_lo(n_L);
    for(int j = 0; j < n_L; ++j) {
        double L = L_of(vgrid(j)), rl = circular_radius(s, L);
        double lo = effective_potential(s, rl, L);
        width[j] = s.energy_cutoff(L) - lo;
        dEdL_lo[j] = 1 / (2 * rl * rl);
        for(int i = 0; i < n_E; ++i) {
            out.L(i, j) = L;
            out.E(i, j) = lo + width[j] * ugrid(i);
        }
    }
    parallel_for(std::size_t(n_E) * n_L, [&](std::size_t idx) {
        int i = idx % n_E, j = idx / n_E;
        out.T(i, j) = period(s, out.E(i, j), out.L(i, j), opt.quad);
    });

    // derivatives in the (u, v) coordinates, mapped to (E, L)
    const double du = (1 - 2 * m) / (n_E - 1), dv = (v_hi - m) / (n_L - 1);
    for(int j = 0; j < n_L; ++j) {
        for(int i = 0; i < n_E; ++i) {
            int i0 = std::max(i - 1, 0), i1 = std::min(i + 1, n_E - 1);
            int j0 = std::max(j - 1, 0), j1 = std::min(j + 1, n_L - 1);
            double Tu = (out.T(i1, j) - out.T(i0, j)) / ((i1 - i0) * du);
            double Tv = (out.T(i, j1) - out.T(i, j0)) / ((j1 - j0) * dv);
            double u = ugrid(i);
            double dTdE = Tu / width[j];
            double dEdL = dEdL_lo[j] * (1 - u) + dEcut * u;
            out.dT_dE(i, j) = dTdE;
            out.dT_dL(i, j) = Tv / (Lmax - L0) - dTdE * dEdL;
        }
    }

    // local refinement of the extrema on shrinking 5x5 patches
    auto refine = [&](Eigen::Index i, Eigen::Index j, double sign, double& best_u, double& best_v) {
        double uc = ugrid(i), vc = vgrid(j), hu = du, hv = dv;
        double best = sign * out.T(i, j);
        best_u = uc;
        best_v = vc;
        for(int level = 0; level < opt.refine_levels; ++level) {
            std::vector<double> us(25), vs(25), ts(25);
            for(int a = 0; a < 5; ++a)
                for(int b = 0; b < 5; ++b) {
                    us[5 * a + b] = std::clamp(uc + hu * (a - 2) / 2, m, 1 - m);
                    vs[5 * a + b] = std::clamp(vc + hv * (b - 2) / 2, m, v_hi);
                }
            parallel_for(25, [&](std::size_t k) { ts[k] = T_at(us[k], vs[k]); });
            for(int k = 0; k < 25; ++k)
                if(sign * ts[k] > best) {
                    best = sign * ts[k];
                    best_u = us[k];
                    best_v = vs[k];
                }
            uc = best_u;
            vc = best_v;
            hu *= 0.5;
            hv *= 0.5;
        }
        return sign * best;
    };
    Eigen::Index imax, jmax, imin, jmin;
    out.T.maxCoeff(&imax, &jmax);
    out.T.minCoeff(&imin, &jmin);
    double umax, vmax, umin, vmin;
    double T_max = refine(imax, jmax, 1, umax, vmax);
    out.T_inf = refine(imin, jmin, -1, umin, vmin);

    // corner (E_cut(L0), L0) by linear extrapolation from the margin
    double t1 = T_at(1 - m, m), t2 = T_at(1 - 2 * m, 2 * m);
    out.T_corner = 2 * t1 - t2;
    out.T_sup = std::max(T_max, out.T_corner);
    out.argmax_L = L_of(vmax);
    out.argmax_E = E_of(umax, out.argmax_L);
    out.argmin_L = L_of(vmin);
    out.argmin_E = E_of(umin, out.argmin_L);
    out.argmax_at_corner = out.T_corner >= T_max || (umax >= 1 - m - du && vmax <= m + dv);

    out.dE_T_min = out.dT_dE.minCoeff();
    out.dL_T_max = out.dT_dL.maxCoeff();
    // slopes below this size are indistinguishable from quadrature noise
    double Escale = s.energy_cutoff(Lmax) - out.E.minCoeff(), Lscale = Lmax - L0;
    out.monotone_E = out.dE_T_min >= -1e-7 * out.T_sup / Escale;
    out.monotone_L = out.dL_T_max <= 1e-7 * out.T_sup / Lscale;
    return out;
}

void write_csv(std::ostream& os, const PeriodSurface& p)
{
    os << "E,L,T,dT_dE,dT_dL\n";
    for(Eigen::Index j = 0; j < p.T.cols(); ++j)
        for(Eigen::Index i = 0; i < p.T.rows(); ++i)
            os << format_double(p.E(i, j)) << ',' << format_double(p.L(i, j)) << ','
               << format_double(p.T(i, j)) << ',' << format_double(p.dT_dE(i, j)) << ','
               << format_double(p.dT_dL(i, j)) << '\n';
}

double limit_L_over_rL4(const RadialSteadyState& s)
{
    if(s.has_inner_vacuum())
        throw ParameterError("limit_L_over_rL4: states with an inner vacuum keep r_L away from 0");
    double t[3], f[3];
    for(int i = 0; i < 3; ++i) {
        double L = std::pow(10.0, -2 - i), rl = circular_radius(s, L);
        t[i] = std::sqrt(L);
        f[i] = L / (rl * rl * rl * rl);
    }
    // quadratic in sqrt(L) evaluated at 0 (Neville)
    double p01 = (t[1] * f[0] - t[0] * f[1]) / (t[1] - t[0]);
    double p12 = (t[2] * f[1] - t[1] * f[2]) / (t[2] - t[1]);
    return (t[2] * p01 - t[0] * p12) / (t[2] - t[0]);
}

}  // namespace vpgap
