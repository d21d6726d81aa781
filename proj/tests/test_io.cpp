#include <doctest.h>

#include <cstdio>
#include <string>

#include "vpgap/errors.hpp"
#include "vpgap/io.hpp"
#include "vpgap/orbits_planar.hpp"

using namespace vpgap;

namespace {

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("radial state round trip is exact")
{
    RadialAnsatz a;
    a.k = 0.5;
    a.l = -0.5;
    a.L0 = 0.1;
    a.kappa = 1;
    SolverControl c;
    c.grid_nodes = 400;
    RadialSteadyState s = solve_radial(a, c);
    std::string path = "io_radial_test.json";
    save_state(path, s);
    RadialSteadyState r = std::get<RadialSteadyState>(load_state(path));
    std::remove(path.c_str());
    CHECK(same(r.r_grid(), s.r_grid()));
    CHECK(same(r.U0(), s.U0()));
    CHECK(same(r.depth(), s.depth()));
    CHECK(same(r.rho0(), s.rho0()));
    CHECK(same(r.m0(), s.m0()));
    CHECK(r.R0() == s.R0());
    CHECK(r.E0() == s.E0());
    CHECK(r.M0() == s.M0());
    CHECK(r.ansatz().L0 == a.L0);
    CHECK(r.inner_radius() == s.inner_radius());
    double L = 0.5 * (a.L0 + max_angular_momentum(s)), E = 0.5 * (minimal_energy(s, L) + s.E0());
    CHECK(period(r, E, L) == period(s, E, L));
}

TEST_CASE("planar state round trip is exact")
{
    PlanarAnsatz a;
    a.kind = PlanarKind::King;
    a.kappa = 1;
    PlanarSteadyState s = solve_planar(a);
    SteadyState back = state_from_json(Json::parse(to_json(SteadyState(s)).dump()));
    const PlanarSteadyState& p = std::get<PlanarSteadyState>(back);
    CHECK(same(p.x_grid(), s.x_grid()));
    CHECK(same(p.U0(), s.U0()));
    CHECK(same(p.depth(), s.depth()));
    CHECK(same(p.rho0(), s.rho0()));
    CHECK(p.E0bar() == s.E0bar());
    CHECK(p.M0() == s.M0());
    CHECK(period_planar(p, s.U_center() + 0.3) == period_planar(s, s.U_center() + 0.3));
}

TEST_CASE("state JSON keys and fallbacks")
{
    PlanarSteadyState k = kurth_planar_state(101);
    Json j = to_json(k);
    std::vector<std::string> keys;
    for(auto& [key, v] : j.items()) keys.push_back(key);
    CHECK(keys == std::vector<std::string>{"kind", "k", "kappa", "x_grid", "U0", "rho0", "R0", "E0bar", "M0", "depth"});
    j.erase("depth");
    const auto& p = std::get<PlanarSteadyState>(state_from_json(j));
    CHECK(p.depth()[3] == k.E0bar() - k.U0()[3]);

    Json r = to_json(kurth_radial_state(101));
    CHECK(r.at("ansatz").at("kind") == "kurth");
    r.erase("m0");
    CHECK_THROWS_AS(state_from_json(r), ParameterError);
    CHECK_THROWS_AS(state_from_json(Json::object()), ParameterError);
    CHECK_THROWS_AS(state_from_json(Json::array()), ParameterError);
    CHECK_THROWS_AS(load_state("does/not/exist.json"), ParameterError);
}

TEST_CASE("spectrum JSON writes infinity as text")
{
    Json j = to_json(essential_spectrum(1, 1.5, SpectrumMode::RadialOdd));
    CHECK(j.at("mode") == "radial_odd");
    CHECK(j.at("gap_count") == 2);
    CHECK(j.at("bands").back()[1] == "inf");
    CHECK(j.at("principal_gap")[1].get<double>() == doctest::Approx(4 * M_PI * M_PI / 2.25));
    Json pt = to_json(essential_spectrum(2, 2, SpectrumMode::RadialOdd));
    CHECK(pt.at("gap_count") == "inf");
}
