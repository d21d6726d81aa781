#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vpgap/numerics.hpp"
#include "vpgap/spectrum.hpp"

namespace vpgap {

/// envelope equations R'' = 1/R^3 - 1/R^2 (spherical) and R'' = 1/R^3 - 1 (planar), R(0) = 1, R'(0) = gamma
enum class KurthGeometry { Spherical, Planar };

std::string to_string(KurthGeometry g);
KurthGeometry kurth_geometry_from_string(const std::string& name);

struct KurthOrbit {
    KurthGeometry geometry = KurthGeometry::Spherical;
    double gamma = 0;
    double E_gamma = 0;
    double R_minus = 0, R_plus = 0;
    double r_star = NAN;  ///< negative root of the planar cubic
    double P = NAN;
};

/// conserved envelope energy R'^2/2 + 1/(2R^2) - 1/R (spherical) or + R (planar)
double kurth_energy(KurthGeometry g, double R, double Rdot);

/// turning values and envelope period; ParameterError for gamma outside (-1, 1) \ {0} (spherical)
/// or gamma = 0 (planar)
KurthOrbit kurth_period(KurthGeometry g, double gamma, const QuadControl& q = {});

/// lim_{gamma -> 0} P by Richardson extrapolation in gamma^2 over gamma = 1e-1, 1e-2, 1e-3
double kurth_limit_period(KurthGeometry g);

struct EnvelopeSample {
    double t, R, Rdot, energy;
};

/// Dormand-Prince integration of the envelope equation, n_samples equidistant samples on [0, t_end]
std::vector<EnvelopeSample> kurth_envelope(KurthGeometry g, double gamma, double t_end, int n_samples,
                                           double rtol = 1e-12);

struct KurthPlacement {
    SpectrumMode mode;
    double particle_period;  ///< T of every particle orbit of the steady state
    double gap_top;
    bool inside;  ///< lambda_limit lies in the principal gap (0, gap_top)
};

struct KurthGapReport {
    KurthGeometry geometry;
    double P_limit, lambda_limit;
    std::vector<KurthPlacement> placements;
};

/// compares (2 pi / P_limit)^2 with the principal gaps: spherical against RadialOdd (T = pi),
/// planar against PlanarOddOdd and PlanarOdd (T = 2 pi)
KurthGapReport kurth_gap_position(KurthGeometry g);

/// header gamma,E_gamma,R_minus,R_plus,P
void write_csv(std::ostream& out, const std::vector<KurthOrbit>& orbits);

}  // namespace vpgap
