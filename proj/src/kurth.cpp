#include "vpgap/kurth.hpp"

#include <cmath>
#include <ostream>

#include "vpgap/errors.hpp"
#include "vpgap/format.hpp"
#include "vpgap/ode.hpp"

namespace vpgap {

std::string to_string(KurthGeometry g)
{
    return g == KurthGeometry::Spherical ? "spherical" : "planar";
}

KurthGeometry kurth_geometry_from_string(const std::string& name)
{
    if(name == "spherical") return KurthGeometry::Spherical;
    if(name == "planar") return KurthGeometry::Planar;
    throw ParameterError("unknown Kurth geometry: " + name);
}

double kurth_energy(KurthGeometry g, double R, double Rdot)
{
    double base = 0.5 * Rdot * Rdot + 1 / (2 * R * R);
    return g == KurthGeometry::Spherical ? base - 1 / R : base + R;
}

KurthOrbit kurth_period(KurthGeometry g, double gamma, const QuadControl& q)
{
    KurthOrbit o;
    o.geometry = g;
    o.gamma = gamma;
    double a = std::fabs(gamma);
    if(g == KurthGeometry::Spherical) {
        if(!(a > 0) || !(a < 1)) throw ParameterError("kurth_period: spherical gamma must satisfy 0 < |gamma| < 1");
        o.E_gamma = 0.5 * gamma * gamma - 0.5;
        // roots of 2 E r^2 + 2 r - 1 with sqrt(1 + 2E) = |gamma|
        o.R_minus = 1 / (1 + a);
        o.R_plus = 1 / (1 - a);
    } else {
        if(!(a > 0) || !std::isfinite(a)) throw ParameterError("kurth_period: planar gamma must be nonzero");
        o.E_gamma = 0.5 * gamma * gamma + 1.5;
        const double E = o.E_gamma;
        // r^3 - E r^2 + 1/2 is positive at 0, negative at 1 and positive at E
        auto p = [&](double r) { return r * r * r - E * r * r + 0.5; };
        o.R_minus = brent_root(p, 0.0, 1.0, 0.5, 1.5 - E);
        o.R_plus = brent_root(p, 1.0, E, 1.5 - E, 0.5);
        o.r_star = -1 / (2 * o.R_minus * o.R_plus);
    }
    // with r = c - h cos(pi s) the factored radicand leaves a smooth integrand
    const double c = 0.5 * (o.R_plus + o.R_minus), h = 0.5 * (o.R_plus - o.R_minus);
    auto f = [&](double s) {
        double r = c - h * std::cos(M_PI * s);
        return g == KurthGeometry::Spherical ? M_PI * r / std::sqrt(-2 * o.E_gamma)
                                             : M_PI * r / std::sqrt(2 * (r - o.r_star));
    };
    o.P = 2 * chebyshev_integrate(f, q).total;
    return o;
}

double kurth_limit_period(KurthGeometry g)
{
    double t[3], f[3];
    for(int i = 0; i < 3; ++i) {
        double gamma = std::pow(10.0, -1 - i);
        t[i] = gamma * gamma;
        f[i] = kurth_period(g, gamma).P;
    }
    double p01 = (t[1] * f[0] - t[0] * f[1]) / (t[1] - t[0]);
    double p12 = (t[2] * f[1] - t[1] * f[2]) / (t[2] - t[1]);
    return (t[2] * p01 - t[0] * p12) / (t[2] - t[0]);
}

std::vector<EnvelopeSample> kurth_envelope(KurthGeometry g, double gamma, double t_end, int n_samples,
                                           double rtol)
{
    if(n_samples < 2 || !(t_end > 0)) throw ParameterError("kurth_envelope: need t_end > 0 and two samples");
    using DP = DormandPrince<2>;
    auto rhs = [g](double, const DP::State& y) {
        double R = y[0];
        DP::State d;
        d << y[1], 1 / (R * R * R) - (g == KurthGeometry::Spherical ? 1 / (R * R) : 1.0);
        return d;
    };
    DP dp(rhs, rtol, rtol);
    DP::State y0(1.0, gamma);
    dp.start(0, y0, 1e-3);
    std::vector<EnvelopeSample> out;
    for(int i = 0; i < n_samples; ++i) {
        double t = t_end * i / (n_samples - 1);
        DP::State y = y0;
        if(i > 0) {
            while(dp.t() < t) dp.step(t);
            y = dp.t() == t ? dp.y() : dp.dense(t);
        }
        out.push_back({t, y[0], y[1], kurth_energy(g, y[0], y[1])});
    }
    return out;
}

KurthGapReport kurth_gap_position(KurthGeometry g)
{
    KurthGapReport r;
    r.geometry = g;
    r.P_limit = kurth_limit_period(g);
    r.lambda_limit = std::pow(2 * M_PI / r.P_limit, 2);
    auto place = [&](SpectrumMode mode, double T) {
        double top = principal_gap_top(T, mode);
        r.placements.push_back({mode, T, top, r.lambda_limit > 0 && r.lambda_limit < top});
    };
    if(g == KurthGeometry::Spherical) {
        place(SpectrumMode::RadialOdd, M_PI);
    } else {
        place(SpectrumMode::PlanarOddOdd, 2 * M_PI);
        place(SpectrumMode::PlanarOdd, 2 * M_PI);
    }
    return r;
}

void write_csv(std::ostream& os, const std::vector<KurthOrbit>& orbits)
{
    os << "gamma,E_gamma,R_minus,R_plus,P\n";
    for(const auto& o : orbits)
        os << format_double(o.gamma) << ',' << format_double(o.E_gamma) << ',' << format_double(o.R_minus)
           << ',' << format_double(o.R_plus) << ',' << format_double(o.P) << '\n';
}

}  // namespace vpgap
