#include "vpgap/orbits_planar.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "vpgap/errors.hpp"
#include "vpgap/format.hpp"

namespace vpgap {

namespace {

double depth(const PlanarSteadyState& s)
{
    return s.E0bar() - s.U_center();
}

}  // namespace

std::pair<double, double> turning_points(const PlanarSteadyState& s, double Ebar)
{
    if(!(Ebar > s.U_center())) throw DomainError("turning_points: Ebar must exceed U0(0)");
    if(Ebar >= s.E0bar()) {
        double xp = Ebar == s.E0bar() ? s.R0() : Ebar / (2 * M_PI * s.M0());
        return {-xp, xp};
    }
    double xp = brent_root([&](double x) { return s.U(x) - Ebar; }, 0.0, s.R0(), s.U_center() - Ebar,
                           s.E0bar() - Ebar);
    return {-xp, xp};
}

PlanarOrbit::PlanarOrbit(const PlanarSteadyState& s, double Ebar, const QuadControl& q)
    : state_(&s), Ebar_(Ebar), x_plus_(turning_points(s, Ebar).second)
{
    quarter_ = chebyshev_integrate([&](double t) { return integrand(t); }, q);
    T_ = 4 * quarter_.total;
}

double PlanarOrbit::integrand(double s) const
{
    // with u = pi (1 - s) / 4 the distance to x_+ is 2 x_+ sin^2 u and
    // Ebar - U0 = (x_+ - x) K with K a mean slope, so the integrand stays smooth
    double u = 0.25 * M_PI * (1 - s), su = std::sin(u);
    double x = x_plus_ - 2 * x_plus_ * su * su;
    double K = state_->U_mean_slope(x, x_plus_);
    return 0.5 * M_PI * std::sqrt(x_plus_) * std::cos(u) / std::sqrt(K);
}

double PlanarOrbit::s_of_x(double x) const
{
    return 2 / M_PI * std::asin(std::clamp(std::fabs(x) / x_plus_, 0.0, 1.0));
}

double PlanarOrbit::theta(double x) const
{
    if(std::fabs(x) > x_plus_) throw DomainError("theta: x outside [x_-, x_+]");
    double part = quarter_(s_of_x(x)) / T_;
    return x >= 0 ? 0.25 + part : 0.25 - part;
}

double period_planar(const PlanarSteadyState& s, double Ebar, const QuadControl& q)
{
    return PlanarOrbit(s, Ebar, q).T();
}

double period_derivative_planar(const PlanarSteadyState& s, double Ebar, const QuadControl& q)
{
    PlanarOrbit o(s, Ebar, q);
    if(s.ansatz().kind == PlanarKind::Kurth && o.x_plus() <= s.R0()) return 0;
    auto f = [&](double t) { return s.period_derivative_weight(o.x_of_s(t)) * o.integrand(t); };
    ChebyshevIntegral w = chebyshev_integrate(f, q);
    return 2 / (Ebar - s.U_center()) * w.total;
}

double theta_planar(const PlanarSteadyState& s, double x, double Ebar, const QuadControl& q)
{
    return PlanarOrbit(s, Ebar, q).theta(x);
}

OrbitPlanar planar_orbit(const PlanarSteadyState& s, double Ebar, const QuadControl& q)
{
    PlanarOrbit o(s, Ebar, q);
    OrbitPlanar out;
    out.Ebar = Ebar;
    out.x_plus = o.x_plus();
    out.x_minus = -o.x_plus();
    out.T = o.T();
    out.Tprime = period_derivative_planar(s, Ebar, q);
    return out;
}

double central_period(const PlanarSteadyState& s)
{
    return std::sqrt(M_PI / s.rho_center());
}

std::vector<OrbitPlanar> planar_orbit_table(const PlanarSteadyState& s, int n, const QuadControl& q)
{
    if(n < 1) throw ParameterError("planar_orbit_table: n must be positive");
    std::vector<OrbitPlanar> out(n);
    parallel_for(std::size_t(n), [&](std::size_t i) {
        out[i] = planar_orbit(s, s.U_center() + depth(s) * double(i + 1) / n, q);
    });
    return out;
}

void write_csv(std::ostream& os, const std::vector<OrbitPlanar>& orbits)
{
    os << "Ebar,x_plus,T,Tprime\n";
    for(const auto& o : orbits)
        os << format_double(o.Ebar) << ',' << format_double(o.x_plus) << ',' << format_double(o.T) << ','
           << format_double(o.Tprime) << '\n';
}

}  // namespace vpgap
