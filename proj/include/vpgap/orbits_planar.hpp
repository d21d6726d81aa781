#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "vpgap/numerics.hpp"
#include "vpgap/steady_planar.hpp"

namespace vpgap {

struct OrbitPlanar {
    double Ebar = 0;
    double x_minus = 0, x_plus = 0;
    double T = NAN, Tprime = NAN;
};

/// (x_-, x_+) with U0(x_+-) = Ebar and x_- = -x_+; DomainError if Ebar <= U0(0)
std::pair<double, double> turning_points(const PlanarSteadyState& s, double Ebar);

/// Orbit with its phase function on the quarter x in [0, x_+], parametrized as
/// x(s) = x_+ sin(pi s / 2); the travel time from 0 is a Chebyshev series in s.
class PlanarOrbit {
public:
    PlanarOrbit(const PlanarSteadyState& s, double Ebar, const QuadControl& q = {});

    double Ebar() const { return Ebar_; }
    double x_plus() const { return x_plus_; }
    double T() const { return T_; }
    double x_of_s(double s) const { return x_plus_ * std::sin(0.5 * M_PI * s); }
    double s_of_x(double x) const;
    /// 0 at x_-, 1/4 at 0, 1/2 at x_+
    double theta(double x) const;
    /// integrand of the quarter period in s, dx / sqrt(2 Ebar - 2 U0) per unit s
    double integrand(double s) const;
    const ChebyshevIntegral& quarter() const { return quarter_; }

private:
    const PlanarSteadyState* state_;
    double Ebar_, x_plus_, T_;
    ChebyshevIntegral quarter_;
};

double period_planar(const PlanarSteadyState& s, double Ebar, const QuadControl& q = {});
/// T' = 2/(Ebar - U0(0)) int_0^{x_+} G/U0'^2 dx / sqrt(2 Ebar - 2 U0)
double period_derivative_planar(const PlanarSteadyState& s, double Ebar, const QuadControl& q = {});
double theta_planar(const PlanarSteadyState& s, double x, double Ebar, const QuadControl& q = {});
/// turning points, T and T'
OrbitPlanar planar_orbit(const PlanarSteadyState& s, double Ebar, const QuadControl& q = {});

/// limit of T at the bottom of the well, 2 pi / sqrt(U0''(0)) = sqrt(pi / rho0(0))
double central_period(const PlanarSteadyState& s);

/// orbits at Ebar_i = U0(0) + kappa (i + 1) / n, i = 0..n-1; the last one sits at E0bar
std::vector<OrbitPlanar> planar_orbit_table(const PlanarSteadyState& s, int n, const QuadControl& q = {});

/// header Ebar,x_plus,T,Tprime
void write_csv(std::ostream& out, const std::vector<OrbitPlanar>& orbits);

}  // namespace vpgap
