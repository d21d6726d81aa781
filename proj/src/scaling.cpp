#include "vpgap/scaling.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "vpgap/errors.hpp"
#include "vpgap/format.hpp"

namespace vpgap {

double eddington_exponent(double k, double l)
{
    return (k + 2 * l + 1.5) / (2 * l + 2);
}

EddingtonTable eddington_ritter_check(double k, double l, double L0, double kappa_base,
                                      const std::vector<double>& sigmas, const EddingtonOptions& opt)
{
    if(sigmas.empty()) throw ParameterError("eddington: no sigma values");
    for(double s : sigmas)
        if(!(s > 0)) throw ParameterError("eddington: sigma must be positive");
    RadialAnsatz base;
    base.kind = RadialKind::Polytrope;
    base.k = k;
    base.l = l;
    base.L0 = L0;
    base.kappa = kappa_base;
    validate(base);

    EddingtonTable out;
    out.k = k;
    out.l = l;
    out.L0 = L0;
    out.kappa_base = kappa_base;
    out.exponent = eddington_exponent(k, l);
    const double a = scaling_exponent(k, l);
    out.rows.resize(sigmas.size());
    for(std::size_t i = 0; i < sigmas.size(); ++i) {
        EddingtonRow& row = out.rows[i];
        row.sigma = sigmas[i];
        RadialAnsatz an = base;
        an.kappa = kappa_base * std::pow(row.sigma, -2.0);
        an.L0 = L0 * std::pow(row.sigma, 2 * a - 2);
        row.kappa = an.kappa;
        row.L0 = an.L0;
        RadialSteadyState s = solve_radial(an, opt.solver);
        row.y0 = s.depth()[0];
        row.rho0 = s.rho_center();
        PeriodSurface surf = period_surface(s, opt.n_E, opt.n_L, opt.surface);
        row.T_sup = surf.T_sup;
        row.combo_T = row.T_sup * std::pow(row.y0, out.exponent);
        if(opt.mathur) {
            MathurScan sc = scan(mathur_tables_radial(s, surf.T_sup, opt.disc), opt.scan);
            if(sc.eigenvalue) {
                row.lambda_star = *sc.eigenvalue;
                double P = 2 * M_PI / std::sqrt(*sc.eigenvalue);
                row.combo_P = P * std::pow(row.y0, out.exponent);
                if(l == 0) row.combo_rho = P * std::sqrt(row.rho0);
            }
        }
    }
    auto spread = [&](auto get) {
        const EddingtonRow* ref = nullptr;
        double worst = std::numeric_limits<double>::quiet_NaN();
        for(const auto& r : out.rows) {
            std::optional<double> v = get(r);
            if(!v) continue;
            if(!ref) {
                ref = &r;
                worst = 0;
            }
            worst = std::max(worst, std::fabs(*v / *get(*ref) - 1));
        }
        return worst;
    };
    out.spread_T = spread([](const EddingtonRow& r) { return std::optional<double>(r.combo_T); });
    out.spread_P = spread([](const EddingtonRow& r) { return r.combo_P; });
    out.spread_rho = spread([](const EddingtonRow& r) { return r.combo_rho; });
    return out;
}

void write_csv(std::ostream& os, const EddingtonTable& t)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    os << "sigma,y0,Tsup,lambda_star,combo_T,combo_P,rho0,combo_rho\n";
    for(const auto& r : t.rows)
        os << format_double(r.sigma) << ',' << format_double(r.y0) << ',' << format_double(r.T_sup) << ','
           << opt(r.lambda_star) << ',' << format_double(r.combo_T) << ',' << opt(r.combo_P) << ','
           << format_double(r.rho0) << ',' << opt(r.combo_rho) << '\n';
}

}  // namespace vpgap
