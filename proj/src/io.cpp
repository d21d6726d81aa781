#include "vpgap/io.hpp"

#include <cmath>
#include <fstream>

#include "vpgap/errors.hpp"

namespace vpgap {

namespace {

Json array(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for(Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json number(double x)
{
    if(std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

Eigen::VectorXd vector(const Json& j, const char* key)
{
    if(!j.contains(key) || !j.at(key).is_array()) throw ParameterError(std::string("state JSON: missing array ") + key);
    const Json& a = j.at(key);
    Eigen::VectorXd v(a.size());
    for(std::size_t i = 0; i < a.size(); ++i) {
        if(!a[i].is_number()) throw ParameterError(std::string("state JSON: non-numeric entry in ") + key);
        v[i] = a[i].get<double>();
    }
    return v;
}

double scalar(const Json& j, const char* key)
{
    if(!j.contains(key) || !j.at(key).is_number()) throw ParameterError(std::string("state JSON: missing number ") + key);
    return j.at(key).get<double>();
}

std::string text(const Json& j, const char* key)
{
    if(!j.contains(key) || !j.at(key).is_string()) throw ParameterError(std::string("state JSON: missing string ") + key);
    return j.at(key).get<std::string>();
}

}  // namespace

Json to_json(const RadialSteadyState& s)
{
    const RadialAnsatz& a = s.ansatz();
    Json j;
    j["ansatz"] = {{"kind", to_string(a.kind)}, {"k", a.k}, {"l", a.l}, {"L0", a.L0}, {"kappa", a.kappa}};
    j["r_grid"] = array(s.r_grid());
    j["U0"] = array(s.U0());
    j["rho0"] = array(s.rho0());
    j["m0"] = array(s.m0());
    j["R0"] = s.R0();
    j["E0"] = s.E0();
    j["M0"] = s.M0();
    j["depth"] = array(s.depth());
    return j;
}

Json to_json(const PlanarSteadyState& s)
{
    const PlanarAnsatz& a = s.ansatz();
    Json j;
    j["kind"] = to_string(a.kind);
    j["k"] = a.k;
    j["kappa"] = a.kappa;
    j["x_grid"] = array(s.x_grid());
    j["U0"] = array(s.U0());
    j["rho0"] = array(s.rho0());
    j["R0"] = s.R0();
    j["E0bar"] = s.E0bar();
    j["M0"] = s.M0();
    j["depth"] = array(s.depth());
    return j;
}

Json to_json(const SteadyState& s)
{
    return std::visit([](const auto& x) { return to_json(x); }, s);
}

SteadyState state_from_json(const Json& j)
{
    if(!j.is_object()) throw ParameterError("state JSON: expected an object");
    Eigen::VectorXd depth = j.contains("depth") ? vector(j, "depth") : Eigen::VectorXd();
    if(j.contains("r_grid")) {
        if(!j.contains("ansatz") || !j.at("ansatz").is_object()) throw ParameterError("state JSON: missing ansatz");
        const Json& ja = j.at("ansatz");
        RadialAnsatz a;
        a.kind = radial_kind_from_string(text(ja, "kind"));
        a.k = scalar(ja, "k");
        a.l = scalar(ja, "l");
        a.L0 = scalar(ja, "L0");
        a.kappa = scalar(ja, "kappa");
        return RadialSteadyState(a, vector(j, "r_grid"), vector(j, "U0"), vector(j, "rho0"), vector(j, "m0"),
                                 scalar(j, "R0"), scalar(j, "E0"), scalar(j, "M0"), depth);
    }
    if(j.contains("x_grid")) {
        PlanarAnsatz a;
        a.kind = planar_kind_from_string(text(j, "kind"));
        a.k = scalar(j, "k");
        a.kappa = scalar(j, "kappa");
        return PlanarSteadyState(a, vector(j, "x_grid"), vector(j, "U0"), vector(j, "rho0"), scalar(j, "R0"),
                                 scalar(j, "E0bar"), scalar(j, "M0"), depth);
    }
    throw ParameterError("state JSON: neither r_grid nor x_grid present");
}

void save_state(const std::string& path, const SteadyState& s)
{
    std::ofstream out(path);
    if(!out) throw ParameterError("cannot write " + path);
    out << to_json(s).dump() << '\n';
    if(!out) throw ParameterError("cannot write " + path);
}

SteadyState load_state(const std::string& path)
{
    std::ifstream in(path);
    if(!in) throw ParameterError("cannot read " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch(const Json::exception& e) {
        throw ParameterError("state JSON: " + std::string(e.what()));
    }
    return state_from_json(j);
}

Json to_json(const Discretization& d)
{
    return {{"n_r", d.n_r},
            {"n_E", d.n_E},
            {"n_L", d.n_L},
            {"K_max", d.K_max},
            {"grading", d.grading},
            {"per_panel", d.per_panel},
            {"levels", d.levels},
            {"k_tol", d.k_tol},
            {"K_limit", d.K_limit},
            {"quad_tol", d.quad.tol}};
}

Json to_json(const SpectrumBands& s)
{
    Json bands = Json::array();
    for(const Band& b : s.bands) bands.push_back({number(b.lo), number(b.hi)});
    Json count = s.gap_count.infinite ? Json("inf") : Json(s.gap_count.value);
    return {{"mode", to_string(s.mode)},
            {"T_inf", s.T_inf},
            {"T_sup", s.T_sup},
            {"principal_gap", {0.0, s.gap_top}},
            {"bands", bands},
            {"gap_count", count}};
}

Json scan_result_json(const MathurTables& t, const MathurScan& s)
{
    Json j;
    j["status"] = to_string(s.status);
    j["gap_top"] = s.gap_top;
    j["eigenvalue"] = s.eigenvalue ? Json(*s.eigenvalue) : Json(nullptr);
    j["period"] = s.eigenvalue ? Json(2 * M_PI / std::sqrt(*s.eigenvalue)) : Json(nullptr);
    j["M_at_eigenvalue"] = s.eigenvalue ? Json(s.M_at_eigenvalue) : Json(nullptr);
    j["max_M"] = s.max_M;
    j["mode_profile"] = array(s.mode_profile);
    j["cell_edges"] = array(t.edges);
    Json d = to_json(t.disc);
    d["K_used"] = t.K;
    d["tail_estimate"] = t.tail_estimate;
    d["n_lambda"] = s.lambda.size();
    d["quadrature_nodes"] = t.nodes.size();
    d["skipped_nodes"] = t.skipped_nodes;
    j["discretization"] = d;
    return j;
}

}  // namespace vpgap
