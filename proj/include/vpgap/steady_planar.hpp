#pragma once

#include <Eigen/Dense>

#include <string>

#include "vpgap/steady_radial.hpp"

namespace vpgap {

/// Polytrope: (E0-E)^k_+ with k > 1/2 ; King: (exp(E0-E)-1)_+ ;
/// Kurth is the constant-density slab, a benchmark outside the admissible class
enum class PlanarKind { Polytrope, King, Kurth };

struct PlanarAnsatz {
    PlanarKind kind = PlanarKind::Polytrope;
    double k = 1;
    double kappa = 1;  ///< central depth E0bar - U0(0)
};

std::string to_string(PlanarKind kind);
PlanarKind planar_kind_from_string(const std::string& name);

void validate(const PlanarAnsatz& a);

/// c_k in htilde(z) = c_k z^{k+1/2}
double planar_polytrope_constant(double k);

/// rho0 as a function of y = E0bar - U0(x); derivatives with respect to z
double htilde(const PlanarAnsatz& a, double z);
double htilde_prime(const PlanarAnsatz& a, double z);
double htilde_second(const PlanarAnsatz& a, double z);
double htilde_third(const PlanarAnsatz& a, double z);
/// int_0^z htilde
double htilde_integral(const PlanarAnsatz& a, double z);

/// Tabulated plane symmetric steady state on x >= 0, extended evenly.
/// U0' is evaluated from the first integral U0'^2 = 8 pi (H(kappa) - H(y)),
/// so only U0 and rho0 are tabulated. Interpolation acts on the depth E0bar - U0,
/// which defaults to E0bar - U0 and keeps full precision near the edge when given.
class PlanarSteadyState {
public:
    PlanarSteadyState(const PlanarAnsatz& ansatz, Eigen::VectorXd x, Eigen::VectorXd U0,
                      Eigen::VectorXd rho0, double R0, double E0bar, double M0,
                      Eigen::VectorXd depth = {});

    const PlanarAnsatz& ansatz() const { return ansatz_; }
    const Eigen::VectorXd& x_grid() const { return x_; }
    const Eigen::VectorXd& U0() const { return U_; }
    const Eigen::VectorXd& depth() const { return y_; }
    const Eigen::VectorXd& rho0() const { return rho_; }
    const Eigen::VectorXd& dU0() const { return dU_; }
    double R0() const { return R0_; }
    double E0bar() const { return E0_; }
    double M0() const { return M0_; }
    double U_center() const { return U_[0]; }
    double rho_center() const { return rho_[0]; }

    double U(double x) const;
    double dU(double x) const;
    double d2U(double x) const;
    /// (U0(b) - U0(a)) / (b - a) for a, b >= 0, accurate when a and b are close
    double U_mean_slope(double a, double b) const;
    double rho(double x) const;

    /// |alpha'(E)| for E below the cutoff, 0 above
    double alpha_prime(double E) const;

    /// (U0'^2 - 2 (U0 - U0(0)) U0'') / U0'^2 at x, bounded as x -> 0
    double period_derivative_weight(double x) const;

private:
    double slope_from_depth(double y) const;

    PlanarAnsatz ansatz_;
    Eigen::VectorXd x_, U_, y_, rho_, dU_;
    double R0_, E0_, M0_;
};

PlanarSteadyState solve_planar(const PlanarAnsatz& ansatz, const SolverControl& ctrl = {});

/// rho0 = 1/(4 pi) on (-1, 1); U0 = (1 + x^2)/2 inside, |x| outside
PlanarSteadyState kurth_planar_state(int nodes = 2001);

/// central depth giving total mass M0 (bracketed root find in log kappa)
double planar_kappa_for_mass(const PlanarAnsatz& ansatz, double M0);
double radial_kappa_for_mass(const RadialAnsatz& ansatz, double M0, const SolverControl& ctrl = {});

/// max over interior nodes of |U0'' - 4 pi rho0|, U0'' by local quartic fits of U0'
double poisson_residual(const PlanarSteadyState& state);

}  // namespace vpgap
