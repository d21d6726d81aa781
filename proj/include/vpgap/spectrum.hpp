#pragma once

#include <string>
#include <vector>

namespace vpgap {

/// index sets of the essential spectrum: RadialFull k >= 0, RadialOdd k >= 1,
/// PlanarOddOdd k = 2, 4, 6, ... (odd in v1 and x), PlanarOdd k >= 1 (odd in v1 only)
enum class SpectrumMode { RadialFull, RadialOdd, PlanarOddOdd, PlanarOdd };

std::string to_string(SpectrumMode mode);
SpectrumMode spectrum_mode_from_string(const std::string& name);

/// number of gaps, infinite iff T_inf = T_sup
struct GapCount {
    bool infinite = false;
    long long value = 0;
    bool operator==(const GapCount&) const = default;
};

std::string to_string(const GapCount& g);

struct Band {
    double lo = 0, hi = 0;  ///< hi is +inf for the tail band
};

struct SpectrumBands {
    SpectrumMode mode = SpectrumMode::RadialOdd;
    double T_inf = 0, T_sup = 0;
    std::vector<Band> bands;  ///< sorted and merged
    double gap_top = 0;       ///< principal gap is (0, gap_top)
    bool tail = false;        ///< last band extends to infinity
    GapCount gap_count;  ///< closed formula
};

/// 1 + sup{k >= 0 : (k + 1) T_inf > k T_sup}
GapCount gap_count(double T_inf, double T_sup);

/// merged bands [4 pi^2 k^2 / T_sup^2, 4 pi^2 k^2 / T_inf^2] for the mode's indices up to k_max;
/// once two neighbours overlap every later pair does, and the rest is one tail band
SpectrumBands essential_spectrum(double T_inf, double T_sup, SpectrumMode mode, int k_max = 64);

/// holes in the merged band list including the principal gap, counted by enumeration;
/// infinite for point bands, ParameterError if the list is cut at k_max before merging
GapCount count_gaps(const SpectrumBands& s);

/// lower edge of the first nonzero band, 4 pi^2 k_min^2 / T_sup^2
double principal_gap_top(double T_sup, SpectrumMode mode);

}  // namespace vpgap
