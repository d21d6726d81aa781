#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "vpgap/mathur.hpp"

namespace vpgap {

struct EddingtonOptions {
    int n_E = 20, n_L = 20;         ///< period surface grid
    SurfaceOptions surface{};
    SolverControl solver{};
    bool mathur = false;            ///< also scan for the eigenvalue of each scaled state
    Discretization disc{};
    ScanOptions scan{};
};

struct EddingtonRow {
    double sigma = 1;
    double kappa = 0, L0 = 0;
    double y0 = 0;                  ///< y(0) = E0 - U0(0)
    double rho0 = 0;                ///< rho0(0)
    double T_sup = 0;
    std::optional<double> lambda_star;
    double combo_T = 0;             ///< T_sup y(0)^p, p = (k + 2l + 3/2) / (2l + 2)
    std::optional<double> combo_P;  ///< P y(0)^p with P = 2 pi / sqrt(lambda_star)
    std::optional<double> combo_rho;  ///< P rho0(0)^{1/2}, l = 0 only
};

struct EddingtonTable {
    double k = 1, l = 0, L0 = 0, kappa_base = 1;
    double exponent = 0;            ///< p above
    std::vector<EddingtonRow> rows;
    /// max |combo / combo(first row) - 1| over the rows; NaN where no row carries the combination
    double spread_T = 0, spread_P = 0, spread_rho = 0;
};

/// (k + 2l + 3/2) / (2l + 2)
double eddington_exponent(double k, double l);

/// Solves the polytrope with kappa = sigma^-2 kappa_base and L0 sigma^{2a - 2} for each sigma
/// from scratch and reports the scaled period combinations.
EddingtonTable eddington_ritter_check(double k, double l, double L0, double kappa_base,
                                      const std::vector<double>& sigmas, const EddingtonOptions& opt = {});

/// header sigma,y0,Tsup,lambda_star,combo_T,combo_P,rho0,combo_rho; missing values are empty
void write_csv(std::ostream& out, const EddingtonTable& table);

}  // namespace vpgap
