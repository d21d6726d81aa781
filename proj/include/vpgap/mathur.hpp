#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "vpgap/orbits_planar.hpp"
#include "vpgap/orbits_radial.hpp"

namespace vpgap {

struct Discretization {
    int n_r = 48;          ///< cells of the piecewise constant G on the support (half line for planar)
    int n_E = 12;          ///< uniform panels in E (or Ebar) before grading
    int n_L = 8;           ///< uniform panels in L (radial only)
    int K_max = 32;        ///< initial harmonic truncation, doubled until the tail estimate meets k_tol
    double grading = 3;    ///< u = t^grading with u the distance to the cutoff corner
    int per_panel = 4;     ///< Gauss-Legendre nodes per panel
    int levels = 12;       ///< extra panels toward the corner, halving in t
    double k_tol = 1e-6;   ///< K-truncation tolerance on the share of the last octave in the top mode
    int K_limit = 1024;    ///< AccuracyError beyond this truncation
    QuadControl quad{};
};

void validate(const Discretization& d);

/// k = 1 data of one (E, L) or Ebar quadrature node
struct FormNode {
    double E = 0, L = 0;
    double T = 0;
    double weight = 0;    ///< prefactor |phi'| / T times the quadrature weight
    Eigen::VectorXd S1;   ///< int over cell j of sin(2 pi m theta) along the orbit, m = 1 radial, 2 planar
};

/// lambda independent part of the Mathur form. With c = 4 pi^2 (radial) or 16 pi^2 (planar),
/// A(lambda) = sum_nodes sum_k weight / (c k^2 / T^2 - lambda) S_k S_k^T. The k = 1 terms are kept
/// per node; for k >= 2 the geometric series in tau = lambda / top_ref is summed into
/// A_high = sum_n tau^n B_n, which converges because top_ref T^2 / (c k^2) <= 1/k^2 up to roundoff.
struct MathurTables {
    bool planar = false;
    Discretization disc;
    int K = 0;                   ///< harmonics actually used
    double tail_estimate = 0;    ///< share of the last harmonic octave in the top mode at mid-gap
    double frequency = 0;        ///< c above
    double T_ref = 0;            ///< period defining top_ref = c / T_ref^2
    double gap_top = 0;          ///< c / max(T_ref, node periods)^2
    Eigen::VectorXd edges;       ///< n_r + 1 cell boundaries
    Eigen::VectorXd W;           ///< int_cell r^2 dr (radial) or int_cell dx (planar)
    std::vector<FormNode> nodes;
    std::vector<Eigen::MatrixXd> B;
    Eigen::MatrixXd tail;        ///< lambda = 0 part of the harmonics k > K/2
    int skipped_nodes = 0;       ///< nodes on numerically circular orbits, dropped
};

MathurTables mathur_tables_radial(const RadialSteadyState& s, double T_sup, const Discretization& d = {});
MathurTables mathur_tables_planar(const PlanarSteadyState& s, const Discretization& d = {});

struct MathurForm {
    Eigen::MatrixXd A;
    Eigen::VectorXd W;
    double lambda = 0;
};

/// DomainError unless 0 < lambda < gap_top
MathurForm assemble_form(const MathurTables& t, double lambda);
MathurForm assemble_form_radial(const RadialSteadyState& s, const PeriodSurface& surface, double lambda,
                                const Discretization& d = {});
MathurForm assemble_form_planar(const PlanarSteadyState& s, double lambda, const Discretization& d = {});

/// max |A - A^T| / max |A|
double symmetry_residual(const Eigen::MatrixXd& A);

struct MLambda {
    double M = 0;
    Eigen::VectorXd G;  ///< cell values, G^T W G = 1
};

/// largest mu of A v = mu W v; SolverError if W is numerically singular
MLambda m_lambda(const MathurForm& form);

/// <G, M G> / <G, G> in the F1 metric for cell values G
double form_value(const MathurForm& form, const Eigen::VectorXd& G);

enum class ScanStatus { Found, None, Inconclusive };
std::string to_string(ScanStatus s);

struct ScanOptions {
    int n_lambda = 24;
    double eps = 1e-4;       ///< scan covers (eps, 1 - eps) * gap_top, geometrically denser toward the top
    double rel_tol = 1e-6;   ///< relative lambda tolerance of the root refinement
    double near_one = 0.99;  ///< M above this at the top offset without crossing 1 is inconclusive
};

struct MathurScan {
    Eigen::VectorXd lambda, M;
    std::vector<int> converged;  ///< K-truncation estimate at this lambda met k_tol
    ScanStatus status = ScanStatus::None;
    std::optional<double> eigenvalue;
    double M_at_eigenvalue = 0;
    Eigen::VectorXd mode_profile;
    double max_M = 0;
    double gap_top = 0;
};

MathurScan scan(const MathurTables& t, const ScanOptions& opt = {});

/// (lambda, M_lambda) at lambda = gap_top (1 - eps)
std::vector<std::pair<double, double>> divergence_probe(const MathurTables& t, const std::vector<double>& eps);

/// direct evaluation of K_lambda(r, sigma) by (E, L) quadrature over the common orbit set
double kernel_radial(const RadialSteadyState& s, double lambda, double r, double sigma, int K,
                     int nodes = 48, const QuadControl& q = {});

/// direct evaluation of the planar kernel Kbar_lambda(x, y)
double kernel_planar(const PlanarSteadyState& s, double lambda, double x, double y, int K, int nodes = 64,
                     const QuadControl& q = {});

/// M_lambda from the Nystrom discretization of the planar kernel on composite Gauss-Legendre nodes
/// in (0, R0); independent of the sum-of-squares assembly
double nystrom_planar(const PlanarSteadyState& s, double lambda, int K = 256, int panels = 16, int per_panel = 6,
                      int energy_nodes = 48, const QuadControl& q = {});

}  // namespace vpgap
