#include "vpgap/spectrum.hpp"

#include <cmath>
#include <limits>

#include "vpgap/errors.hpp"

namespace vpgap {

namespace {

void check_periods(double T_inf, double T_sup)
{
    if(!(T_inf > 0) || !(T_sup >= T_inf) || !std::isfinite(T_sup))
        throw ParameterError("spectrum: need 0 < T_inf <= T_sup < inf");
}

int index_step(SpectrumMode mode)
{
    return mode == SpectrumMode::PlanarOddOdd ? 2 : 1;
}

}  // namespace

std::string to_string(SpectrumMode mode)
{
    switch(mode) {
        case SpectrumMode::RadialFull: return "radial_full";
        case SpectrumMode::RadialOdd: return "radial_odd";
        case SpectrumMode::PlanarOddOdd: return "planar_odd_odd";
        case SpectrumMode::PlanarOdd: return "planar_odd";
    }
    return "?";
}

SpectrumMode spectrum_mode_from_string(const std::string& name)
{
    for(auto m : {SpectrumMode::RadialFull, SpectrumMode::RadialOdd, SpectrumMode::PlanarOddOdd,
                  SpectrumMode::PlanarOdd})
        if(name == to_string(m)) return m;
    throw ParameterError("unknown spectrum mode: " + name);
}

std::string to_string(const GapCount& g)
{
    return g.infinite ? "inf" : std::to_string(g.value);
}

GapCount gap_count(double T_inf, double T_sup)
{
    check_periods(T_inf, T_sup);
    if(T_inf == T_sup) return {true, 0};
    // (k + 1) T_inf > k T_sup  <=>  k < T_inf / (T_sup - T_inf); fix the rounding of the guess
    double r = T_inf / (T_sup - T_inf);
    if(r > 1e15) throw ParameterError("gap_count: count exceeds the integer range");
    long long k = std::max(0LL, (long long)std::ceil(r) - 1);
    auto holds = [&](long long j) { return double(j + 1) * T_inf > double(j) * T_sup; };
    while(k > 0 && !holds(k)) --k;
    while(holds(k + 1)) ++k;
    return {false, 1 + k};
}

double principal_gap_top(double T_sup, SpectrumMode mode)
{
    double k = index_step(mode);
    return 4 * M_PI * M_PI * k * k / (T_sup * T_sup);
}

SpectrumBands essential_spectrum(double T_inf, double T_sup, SpectrumMode mode, int k_max)
{
    check_periods(T_inf, T_sup);
    if(k_max < 1) throw ParameterError("essential_spectrum: k_max must be at least 1");
    SpectrumBands out;
    out.mode = mode;
    out.T_inf = T_inf;
    out.T_sup = T_sup;
    out.gap_top = principal_gap_top(T_sup, mode);
    const double c = 4 * M_PI * M_PI, step = index_step(mode);
    if(mode == SpectrumMode::RadialFull) out.bands.push_back({0, 0});
    // neighbours closer than a few ulps count as touching
    const double touch = 4 * std::numeric_limits<double>::epsilon();
    for(int j = 1; j <= k_max; ++j) {
        double k = step * j;
        Band b{c * k * k / (T_sup * T_sup), c * k * k / (T_inf * T_inf)};
        if(j > 1 && b.lo - out.bands.back().hi <= touch * b.lo) {
            out.bands.back().hi = std::numeric_limits<double>::infinity();
            out.tail = true;
            break;
        }
        out.bands.push_back(b);
    }
    out.gap_count = gap_count(T_inf, T_sup);
    return out;
}

GapCount count_gaps(const SpectrumBands& s)
{
    if(!s.tail) {
        if(s.T_inf == s.T_sup) return {true, 0};
        throw ParameterError("count_gaps: bands do not merge below k_max");
    }
    long long nonzero = 0;
    for(const Band& b : s.bands)
        if(b.hi > 0) ++nonzero;
    return {false, nonzero};
}

}  // namespace vpgap
