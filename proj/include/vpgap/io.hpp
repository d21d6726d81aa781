#pragma once

#include <json.hpp>

#include <string>
#include <variant>

#include "vpgap/mathur.hpp"
#include "vpgap/spectrum.hpp"
#include "vpgap/steady_planar.hpp"
#include "vpgap/steady_radial.hpp"

namespace vpgap {

using Json = nlohmann::ordered_json;
using SteadyState = std::variant<RadialSteadyState, PlanarSteadyState>;

/// {ansatz:{kind,k,l,L0,kappa}, r_grid, U0, rho0, m0, R0, E0, M0, depth}
Json to_json(const RadialSteadyState& s);
/// {kind, k, kappa, x_grid, U0, rho0, R0, E0bar, M0, depth}
Json to_json(const PlanarSteadyState& s);
Json to_json(const SteadyState& s);

/// radial if the object has r_grid, planar if it has x_grid; a missing depth array
/// falls back to E0 - U0. ParameterError on malformed input.
SteadyState state_from_json(const Json& j);

void save_state(const std::string& path, const SteadyState& s);
SteadyState load_state(const std::string& path);

Json to_json(const Discretization& d);
/// {mode, T_inf, T_sup, principal_gap:[0, top], bands:[[lo, hi], ...], gap_count};
/// infinite values are written as the string "inf"
Json to_json(const SpectrumBands& s);
/// {status, gap_top, eigenvalue, period, M_at_eigenvalue, max_M, mode_profile, cell_edges, discretization}
Json scan_result_json(const MathurTables& t, const MathurScan& s);

}  // namespace vpgap
