#pragma once

#include <Eigen/Dense>

#include <iosfwd>

#include "vpgap/numerics.hpp"
#include "vpgap/steady_radial.hpp"

namespace vpgap {

struct OrbitRadial {
    double E = 0, L = 0;
    double r_L = 0;  ///< minimizer of the effective potential
    double r_minus = 0, r_plus = 0;
    double T = NAN;  ///< radial period, NaN until computed
};

/// Psi_L(r) = L/(2r^2) + U0(r)
double effective_potential(const RadialSteadyState& s, double r, double L);

/// unique root of r m0(r) = L
double circular_radius(const RadialSteadyState& s, double L);

/// turning radii; throws NoOrbitError for circular or degenerate orbits, DomainError if E >= 0
OrbitRadial orbit_geometry(const RadialSteadyState& s, double E, double L);

/// Orbit with its phase function. The radius is parametrized as
/// r(s) = c - a cos(pi s), s in [0, 1], and the travel time from r_- is a Chebyshev series in s.
class RadialOrbit {
public:
    RadialOrbit(const RadialSteadyState& s, double E, double L, const QuadControl& q = {});

    const OrbitRadial& info() const { return info_; }
    double T() const { return info_.T; }
    double r_of_s(double s) const;
    double dr_ds(double s) const;
    double s_of_r(double r) const;
    /// theta along the outgoing branch, 0 at r_- and 1/2 at r_+
    double theta_of_s(double s) const { return time_(s) / info_.T; }
    double theta(double r) const;
    const ChebyshevIntegral& time() const { return time_; }

private:
    OrbitRadial info_;
    double c_, a_;
    ChebyshevIntegral time_;
};

double period(const RadialSteadyState& s, double E, double L, const QuadControl& q = {});
double theta(const RadialSteadyState& s, double r, double E, double L, const QuadControl& q = {});

/// L_max = max_r 2 r^2 (E_cut - U0(r))
double max_angular_momentum(const RadialSteadyState& s);
/// lower end Psi_L(r_L) of the energy range at fixed L
double minimal_energy(const RadialSteadyState& s, double L);

/// T <= 2 pi M0^2 / (E^2 sqrt L)
double period_upper_bound(const RadialSteadyState& s, double E, double L);
/// T >= (4 pi max rho0 + 3 L / r_L^4)^{-1/2}
double period_lower_bound(const RadialSteadyState& s, const OrbitRadial& orbit);

struct SurfaceOptions {
    double margin = 1e-4;  ///< relative distance of the grid from the boundary of the (E, L) support
    int refine_levels = 4;
    QuadControl quad{};
};

/// T over the (E, L) support. Cells sit on the tensor grid of
/// u in [margin, 1 - margin] (fraction of [Psi_L(r_L), E_cut(L)]) and v in [margin, 1 - margin]
/// (fraction of [L0, L_max]); rows index E, columns index L.
struct PeriodSurface {
    Eigen::MatrixXd E, L, T, dT_dE, dT_dL;
    double T_sup = 0, T_inf = 0;
    double argmax_E = 0, argmax_L = 0, argmin_E = 0, argmin_L = 0;
    double dE_T_min = 0, dL_T_max = 0;
    bool monotone_E = false;  ///< dT/dE >= 0 at all cells
    bool monotone_L = false;  ///< dT/dL <= 0 at all cells
    bool argmax_at_corner = false;  ///< refined maximum lies in the grid cell at (E0, L0)
    double T_corner = 0;  ///< extrapolated T at the (E_cut(L0), L0) corner
    double margin = 0;
    int n_E = 0, n_L = 0;
};

PeriodSurface period_surface(const RadialSteadyState& s, int n_E, int n_L,
                             const SurfaceOptions& opt = {});

/// header E,L,T,dT_dE,dT_dL
void write_csv(std::ostream& out, const PeriodSurface& surface);

/// lim_{L -> 0} L / r_L^4 by Richardson extrapolation in sqrt(L) over L = 1e-2, 1e-3, 1e-4
double limit_L_over_rL4(const RadialSteadyState& s);

}  // namespace vpgap
