#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "vpgap/errors.hpp"
#include "vpgap/format.hpp"
#include "vpgap/io.hpp"
#include "vpgap/kurth.hpp"
#include "vpgap/mathur.hpp"
#include "vpgap/orbits_planar.hpp"
#include "vpgap/scaling.hpp"

using namespace vpgap;

namespace {

/// writes to the file, or to stdout for "-"
void emit(const std::string& path, const std::function<void(std::ostream&)>& write)
{
    if(path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if(!out) throw ParameterError("cannot write " + path);
    write(out);
    if(!out) throw ParameterError("cannot write " + path);
}

void emit_json(const std::string& path, const Json& j)
{
    emit(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

struct StateFlags {
    std::string kind = "polytrope";
    double k = 1, l = 0, L0 = 0;
    std::optional<double> kappa, M0;
    double rho = 1, R = 1;
    int nodes = 4000;
    std::string out = "-";
};

void add_state_flags(CLI::App* cmd, StateFlags& f, bool radial)
{
    cmd->add_option("--kind", f.kind,
                    radial ? "polytrope, king, kurth or homogeneous" : "polytrope, king or kurth")
        ->capture_default_str();
    cmd->add_option("--k", f.k, "polytropic exponent k")->capture_default_str();
    if(radial) {
        cmd->add_option("--l", f.l, "angular momentum exponent l")->capture_default_str();
        cmd->add_option("--L0", f.L0, "angular momentum cutoff L0")->capture_default_str();
        cmd->add_option("--rho", f.rho, "density of the homogeneous ball")->capture_default_str();
        cmd->add_option("--R", f.R, "radius of the homogeneous ball")->capture_default_str();
    }
    auto* kappa = cmd->add_option("--kappa", f.kappa, "central depth E0 - U0(0)");
    auto* M0 = cmd->add_option("--M0", f.M0, "total mass (root find on kappa)");
    kappa->excludes(M0);
    cmd->add_option("--nodes", f.nodes, "grid nodes on the support")->capture_default_str();
    cmd->add_option("--out", f.out, "state JSON file, - for stdout")->capture_default_str();
}

SteadyState build_radial(const StateFlags& f)
{
    RadialAnsatz a;
    a.kind = radial_kind_from_string(f.kind);
    if(a.kind == RadialKind::Kurth) return kurth_radial_state(f.nodes);
    if(a.kind == RadialKind::Homogeneous) return homogeneous_state(f.rho, f.R, f.nodes);
    a.k = f.k;
    a.l = f.l;
    a.L0 = f.L0;
    SolverControl c;
    c.grid_nodes = f.nodes;
    a.kappa = f.M0 ? radial_kappa_for_mass(a, *f.M0, c) : f.kappa.value_or(1.0);
    return solve_radial(a, c);
}

SteadyState build_planar(const StateFlags& f)
{
    PlanarAnsatz a;
    a.kind = planar_kind_from_string(f.kind);
    if(a.kind == PlanarKind::Kurth) return kurth_planar_state(f.nodes);
    a.k = f.k;
    a.kappa = f.M0 ? planar_kappa_for_mass(a, *f.M0) : f.kappa.value_or(1.0);
    SolverControl c;
    c.grid_nodes = f.nodes;
    return solve_planar(a, c);
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while(std::getline(ss, item, ',')) {
        try {
            std::size_t used;
            out.push_back(std::stod(item, &used));
            if(used != item.size()) throw std::invalid_argument(item);
        } catch(const std::exception&) {
            throw ParameterError("not a number list: " + text);
        }
    }
    if(out.empty()) throw ParameterError("empty number list");
    return out;
}

struct SurfaceFlags {
    int n_E = 20, n_L = 20;
    double margin = 1e-4;
};

PeriodSurface surface_of(const RadialSteadyState& s, const SurfaceFlags& f)
{
    SurfaceOptions o;
    o.margin = f.margin;
    return period_surface(s, f.n_E, f.n_L, o);
}

const RadialSteadyState& radial_only(const SteadyState& s, const char* what)
{
    if(!std::holds_alternative<RadialSteadyState>(s))
        throw ParameterError(std::string(what) + " needs a radial state");
    return std::get<RadialSteadyState>(s);
}

const PlanarSteadyState& planar_only(const SteadyState& s, const char* what)
{
    if(!std::holds_alternative<PlanarSteadyState>(s))
        throw ParameterError(std::string(what) + " needs a planar state");
    return std::get<PlanarSteadyState>(s);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady galaxy models, period functions, essential spectra and oscillating modes"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
    std::function<void()> action;

    // steady
    auto* steady = app.add_subcommand("steady", "build a steady state and write it as JSON");
    steady->require_subcommand(1);
    StateFlags radial_flags, planar_flags;
    auto* st_r = steady->add_subcommand("radial", "spherically symmetric state");
    add_state_flags(st_r, radial_flags, true);
    st_r->callback([&] {
        action = [&] { emit_json(radial_flags.out, to_json(build_radial(radial_flags))); };
    });
    auto* st_p = steady->add_subcommand("planar", "plane symmetric state");
    add_state_flags(st_p, planar_flags, false);
    st_p->callback([&] {
        action = [&] { emit_json(planar_flags.out, to_json(build_planar(planar_flags))); };
    });

    // period
    auto* per = app.add_subcommand("period", "period function tables");
    per->require_subcommand(1);
    std::string state_path, out = "-";
    SurfaceFlags sf;
    auto* per_s = per->add_subcommand("surface", "T(E, L) on the radial support, CSV");
    per_s->add_option("--state", state_path, "radial state JSON")->required();
    per_s->add_option("--nE", sf.n_E, "energy grid points")->capture_default_str();
    per_s->add_option("--nL", sf.n_L, "angular momentum grid points")->capture_default_str();
    per_s->add_option("--margin", sf.margin, "relative distance from the support boundary")->capture_default_str();
    per_s->add_option("--out", out, "CSV file, - for stdout")->capture_default_str();
    per_s->callback([&] {
        action = [&] {
            SteadyState s = load_state(state_path);
            PeriodSurface p = surface_of(radial_only(s, "period surface"), sf);
            emit(out, [&](std::ostream& os) { write_csv(os, p); });
        };
    });
    int n_table = 50;
    auto* per_p = per->add_subcommand("planar-table", "T(Ebar) and T'(Ebar) of a planar state, CSV");
    per_p->add_option("--state", state_path, "planar state JSON")->required();
    per_p->add_option("--nE", n_table, "number of energies")->capture_default_str();
    per_p->add_option("--out", out, "CSV file, - for stdout")->capture_default_str();
    per_p->callback([&] {
        action = [&] {
            SteadyState s = load_state(state_path);
            auto rows = planar_orbit_table(planar_only(s, "period planar-table"), n_table);
            emit(out, [&](std::ostream& os) { write_csv(os, rows); });
        };
    });

    // spectrum
    std::string mode_name;
    int k_max = 64;
    auto* spec = app.add_subcommand("spectrum", "essential spectrum bands and the principal gap, JSON");
    spec->add_option("--state", state_path, "state JSON")->required();
    spec->add_option("--mode", mode_name,
                     "radial_full, radial_odd, planar_odd_odd or planar_odd; default radial_odd or planar_odd_odd");
    spec->add_option("--nE", sf.n_E, "energy grid points of the radial period surface")->capture_default_str();
    spec->add_option("--nL", sf.n_L, "angular momentum grid points of the radial period surface")->capture_default_str();
    spec->add_option("--kmax", k_max, "largest band index")->capture_default_str();
    spec->add_option("--out", out, "JSON file, - for stdout")->capture_default_str();
    spec->callback([&] {
        action = [&] {
            SteadyState s = load_state(state_path);
            double T_inf, T_sup;
            SpectrumMode mode;
            Json disc;
            if(auto* r = std::get_if<RadialSteadyState>(&s)) {
                PeriodSurface p = surface_of(*r, sf);
                T_inf = p.T_inf;
                T_sup = p.T_sup;
                mode = mode_name.empty() ? SpectrumMode::RadialOdd : spectrum_mode_from_string(mode_name);
                disc = {{"n_E", sf.n_E}, {"n_L", sf.n_L}, {"margin", sf.margin}, {"k_max", k_max}};
            } else {
                const auto& p = std::get<PlanarSteadyState>(s);
                T_inf = central_period(p);
                T_sup = period_planar(p, p.E0bar());
                mode = mode_name.empty() ? SpectrumMode::PlanarOddOdd : spectrum_mode_from_string(mode_name);
                disc = {{"k_max", k_max}};
            }
            Json j = to_json(essential_spectrum(T_inf, T_sup, mode, k_max));
            j["discretization"] = disc;
            emit_json(out, j);
        };
    });

    // mathur
    auto* mat = app.add_subcommand("mathur", "Mathur operator scan over the principal gap");
    mat->require_subcommand(1);
    Discretization disc;
    ScanOptions scan_opt;
    std::string summary = "-";
    auto add_mathur_flags = [&](CLI::App* c) {
        c->add_option("--state", state_path, "state JSON")->required();
        c->add_option("--nr", disc.n_r, "cells of the mode profile")->capture_default_str();
        c->add_option("--nE", disc.n_E, "energy panels")->capture_default_str();
        c->add_option("--nL", disc.n_L, "angular momentum panels (radial)")->capture_default_str();
        c->add_option("--kmax", disc.K_max, "initial harmonic truncation")->capture_default_str();
        c->add_option("--grading", disc.grading, "grading exponent toward the cutoff")->capture_default_str();
        c->add_option("--levels", disc.levels, "extra panels toward the cutoff")->capture_default_str();
        c->add_option("--nlambda", scan_opt.n_lambda, "scan points")->capture_default_str();
        c->add_option("--eps", scan_opt.eps, "relative distance of the scan from the gap edges")->capture_default_str();
        c->add_option("--surface-nE", sf.n_E, "period surface grid in E (radial)")->capture_default_str();
        c->add_option("--surface-nL", sf.n_L, "period surface grid in L (radial)")->capture_default_str();
    };
    auto tables_of = [&](const SteadyState& s) {
        if(auto* r = std::get_if<RadialSteadyState>(&s)) return mathur_tables_radial(*r, surface_of(*r, sf).T_sup, disc);
        return mathur_tables_planar(std::get<PlanarSteadyState>(s), disc);
    };
    auto* mat_scan = mat->add_subcommand("scan", "M_lambda on the scan grid as CSV; JSON summary to --summary");
    add_mathur_flags(mat_scan);
    mat_scan->add_option("--out", out, "CSV file, - for stdout")->capture_default_str();
    mat_scan->add_option("--summary", summary, "JSON summary with the discretization, - for stdout")
        ->capture_default_str();
    mat_scan->callback([&] {
        action = [&] {
            MathurTables t = tables_of(load_state(state_path));
            MathurScan s = scan(t, scan_opt);
            emit(out, [&](std::ostream& os) {
                os << "lambda,M_lambda,converged_flag\n";
                for(Eigen::Index i = 0; i < s.lambda.size(); ++i)
                    os << format_double(s.lambda[i]) << ',' << format_double(s.M[i]) << ',' << s.converged[i]
                       << '\n';
            });
            if(!(summary == "-" && out == "-")) emit_json(summary, scan_result_json(t, s));
        };
    });
    auto* mat_find = mat->add_subcommand("find", "eigenvalue in the principal gap, JSON");
    add_mathur_flags(mat_find);
    mat_find->add_option("--out", out, "JSON file, - for stdout")->capture_default_str();
    mat_find->callback([&] {
        action = [&] {
            MathurTables t = tables_of(load_state(state_path));
            emit_json(out, scan_result_json(t, scan(t, scan_opt)));
        };
    });

    // kurth
    std::string geometry = "spherical", gammas = "0.1,0.01,0.001", report;
    auto* kur = app.add_subcommand("kurth", "envelope periods of the Kurth families, CSV");
    kur->add_option("--geometry", geometry, "spherical or planar")->capture_default_str();
    kur->add_option("--gamma-list", gammas, "comma separated gamma values")->capture_default_str();
    kur->add_option("--out", out, "CSV file, - for stdout")->capture_default_str();
    kur->add_option("--report", report, "also write the gap placement of the limit period as JSON");
    kur->callback([&] {
        action = [&] {
            KurthGeometry g = kurth_geometry_from_string(geometry);
            std::vector<double> gs = parse_list(gammas);
            std::vector<KurthOrbit> rows(gs.size());
            parallel_for(gs.size(), [&](std::size_t i) { rows[i] = kurth_period(g, gs[i]); });
            emit(out, [&](std::ostream& os) { write_csv(os, rows); });
            if(!report.empty()) {
                KurthGapReport r = kurth_gap_position(g);
                Json pl = Json::array();
                for(const auto& p : r.placements)
                    pl.push_back({{"mode", to_string(p.mode)},
                                  {"particle_period", p.particle_period},
                                  {"gap_top", p.gap_top},
                                  {"inside", p.inside}});
                emit_json(report, {{"geometry", to_string(r.geometry)},
                                   {"P_limit", r.P_limit},
                                   {"lambda_limit", r.lambda_limit},
                                   {"placements", pl}});
            }
        };
    });

    // eddington
    double ek = 1, el = 0, eL0 = 0, ekappa = 1;
    std::string sigmas = "1,2,4";
    bool with_mathur = false;
    auto* edd = app.add_subcommand("eddington", "scaled period combinations across a polytropic family, CSV");
    edd->add_option("--k", ek, "polytropic exponent k")->capture_default_str();
    edd->add_option("--l", el, "angular momentum exponent l")->capture_default_str();
    edd->add_option("--L0", eL0, "angular momentum cutoff of the sigma = 1 member")->capture_default_str();
    edd->add_option("--kappa", ekappa, "central depth of the sigma = 1 member")->capture_default_str();
    edd->add_option("--sigmas", sigmas, "comma separated scaling factors")->capture_default_str();
    edd->add_flag("--mathur", with_mathur, "scan each member for the eigenvalue");
    edd->add_option("--out", out, "CSV file, - for stdout")->capture_default_str();
    edd->callback([&] {
        action = [&] {
            EddingtonOptions o;
            o.mathur = with_mathur;
            o.n_E = sf.n_E;
            o.n_L = sf.n_L;
            EddingtonTable t = eddington_ritter_check(ek, el, eL0, ekappa, parse_list(sigmas), o);
            emit(out, [&](std::ostream& os) { write_csv(os, t); });
        };
    });

    try {
        app.parse(argc, argv);
    } catch(const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch(const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch(const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    try {
        set_thread_count(threads);
        if(action) action();
        return 0;
    } catch(const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch(const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
