#pragma once

#include <Eigen/Dense>

#include <string>

namespace vpgap {

/// Polytrope: (E0-E)^k_+ (L-L0)^l_+ ; King: (exp(E0-E)-1)_+ ;
/// Kurth and Homogeneous are constant-density benchmark balls outside the admissible class
enum class RadialKind { Polytrope, King, Kurth, Homogeneous };

struct RadialAnsatz {
    RadialKind kind = RadialKind::Polytrope;
    double k = 1;
    double l = 0;
    double L0 = 0;
    double kappa = 1;  ///< central depth E0 - U0(0)
};

std::string to_string(RadialKind kind);
RadialKind radial_kind_from_string(const std::string& name);

/// throws ParameterError unless the ansatz lies in the admissible range
void validate(const RadialAnsatz& a);

/// c_{k,l} in rho = c_{k,l} r^{2l} (y - L0/2r^2)_+^{k+l+3/2}
double polytrope_constant(double k, double l);

/// rho0 as a function of y = E0 - U0(r) and r
double macroscopic_density(const RadialAnsatz& a, double y, double r);

/// |d phi / dE| at (E, L) for cutoff energy E0; zero outside the support
double phi_prime_abs(const RadialAnsatz& a, double E0, double E, double L);

struct SolverControl {
    double rtol = 1e-12;
    double atol = 1e-22;
    double initial_step = 1e-4;
    int grid_nodes = 4000;     ///< nodes on the support
    int vacuum_nodes = 64;     ///< nodes on the inner vacuum of shells
    double max_radius = 1e6;
};

/// Tabulated spherically symmetric steady state; immutable after construction.
/// Between nodes the depth E0 - U0 and m0 are cubic Hermite interpolants with the exact
/// nodal slopes -m0/r^2 and 4 pi r^2 rho0. The depth is kept separately because it
/// carries full relative precision near the support edge; it defaults to E0 - U0.
class RadialSteadyState {
public:
    RadialSteadyState(const RadialAnsatz& ansatz, Eigen::VectorXd r, Eigen::VectorXd U0,
                      Eigen::VectorXd rho0, Eigen::VectorXd m0, double R0, double E0, double M0,
                      Eigen::VectorXd depth = {});

    const RadialAnsatz& ansatz() const { return ansatz_; }
    const Eigen::VectorXd& r_grid() const { return r_; }
    const Eigen::VectorXd& U0() const { return U_; }
    const Eigen::VectorXd& depth() const { return y_; }
    const Eigen::VectorXd& rho0() const { return rho_; }
    const Eigen::VectorXd& m0() const { return m_; }
    double R0() const { return R0_; }
    double E0() const { return E0_; }
    double M0() const { return M0_; }
    double L0() const { return ansatz_.L0; }
    double rho_center() const { return rho_[0]; }
    double rho_max() const { return rho_max_; }
    /// lower edge of the spatial support (0 unless there is an inner vacuum)
    double inner_radius() const { return r_inner_; }
    bool has_inner_vacuum() const { return r_inner_ > 0; }

    double U(double r) const;
    double dU(double r) const;
    /// (U0(b) - U0(a)) / (b - a), accurate when a and b are close
    double U_mean_slope(double a, double b) const;
    double m(double r) const;
    double rho(double r) const;

    /// supremum of E over the (E, L) support at fixed L
    double energy_cutoff(double L) const;
    /// |d phi/dE|(E, L)
    double phi_prime(double E, double L) const;

private:
    std::size_t cell(double r) const;

    RadialAnsatz ansatz_;
    Eigen::VectorXd r_, U_, y_, rho_, m_, dU_, dm_;
    double R0_, E0_, M0_, r_inner_ = 0, rho_max_ = 0;
};

RadialSteadyState solve_radial(const RadialAnsatz& ansatz, const SolverControl& ctrl = {});

/// rho0 = 3/(4 pi) on the unit ball; U0 = r^2/2 - 3/2 inside, -1/r outside
RadialSteadyState kurth_radial_state(int nodes = 2001);

/// constant density ball, U0 harmonic with omega^2 = 4 pi rho / 3 inside
RadialSteadyState homogeneous_state(double rho, double R, int nodes = 2001);

/// y_sigma(r) = sigma^-2 y(sigma^-a r), a = (2(k+l)+1)/(2l+2)
RadialSteadyState scale_state(const RadialSteadyState& state, double sigma);

/// exponent a of the polytropic scaling family
double scaling_exponent(double k, double l);

/// max over interior nodes of |(r^2 U0')'/r^2 - 4 pi rho0|, derivative by local quartic fits
double poisson_residual(const RadialSteadyState& state);

}  // namespace vpgap
