#include "vpgap/steady_planar.hpp"

#include <algorithm>
#include <cmath>

#include "vpgap/errors.hpp"
#include "vpgap/numerics.hpp"
#include "vpgap/ode.hpp"

namespace vpgap {

namespace {

const double sqrt2pi = std::sqrt(2 * M_PI);

/// sqrt(2 pi) sum_{n >= n0} z^{n+shift} / Gamma(n+shift+1)
double king_series(double z, int n0, double shift)
{
    double term = std::pow(z, n0 + shift) / std::tgamma(n0 + shift + 1), sum = 0;
    for(int n = n0; n < n0 + 400 && term > 1e-18 * sum; ++n) {
        sum += term;
        term *= z / (n + shift + 1);
    }
    return sqrt2pi * sum;
}

}  // namespace

std::string to_string(PlanarKind kind)
{
    switch(kind) {
        case PlanarKind::Polytrope: return "polytrope";
        case PlanarKind::King: return "king";
        case PlanarKind::Kurth: return "kurth";
    }
    return "unknown";
}

PlanarKind planar_kind_from_string(const std::string& name)
{
    if(name == "polytrope") return PlanarKind::Polytrope;
    if(name == "king") return PlanarKind::King;
    if(name == "kurth") return PlanarKind::Kurth;
    throw ParameterError("unknown planar ansatz kind '" + name + "'");
}

void validate(const PlanarAnsatz& a)
{
    if(!(a.kappa > 0))
        throw ParameterError("kappa must be positive");
    if(a.kind == PlanarKind::Polytrope && !(a.k > 0.5))
        throw ParameterError("planar polytrope requires k > 1/2");
}

double planar_polytrope_constant(double k)
{
    return std::sqrt(2.0) * std::beta(k + 1, 0.5);
}

double htilde(const PlanarAnsatz& a, double z)
{
    if(!(z > 0)) return 0;
    switch(a.kind) {
        case PlanarKind::Polytrope:
            return planar_polytrope_constant(a.k) * std::pow(z, a.k + 0.5);
        case PlanarKind::King:
            if(z < 3) return king_series(z, 1, 0.5);
            return sqrt2pi * std::exp(z) * std::erf(std::sqrt(z)) - 2 * std::sqrt(2 * z);
        default:
            throw ParameterError("htilde: the Kurth slab has no ansatz density");
    }
}

double htilde_prime(const PlanarAnsatz& a, double z)
{
    if(!(z > 0)) return 0;
    switch(a.kind) {
        case PlanarKind::Polytrope:
            return planar_polytrope_constant(a.k) * (a.k + 0.5) * std::pow(z, a.k - 0.5);
        case PlanarKind::King:
            return sqrt2pi * std::exp(z) * std::erf(std::sqrt(z));
        default:
            throw ParameterError("htilde: the Kurth slab has no ansatz density");
    }
}

double htilde_second(const PlanarAnsatz& a, double z)
{
    if(!(z > 0)) return 0;
    switch(a.kind) {
        case PlanarKind::Polytrope:
            return planar_polytrope_constant(a.k) * (a.k + 0.5) * (a.k - 0.5) * std::pow(z, a.k - 1.5);
        case PlanarKind::King:
            return htilde_prime(a, z) + std::sqrt(2 / z);
        default:
            throw ParameterError("htilde: the Kurth slab has no ansatz density");
    }
}

double htilde_third(const PlanarAnsatz& a, double z)
{
    if(!(z > 0)) return 0;
    switch(a.kind) {
        case PlanarKind::Polytrope:
            return planar_polytrope_constant(a.k) * (a.k + 0.5) * (a.k - 0.5) * (a.k - 1.5)
                * std::pow(z, a.k - 2.5);
        case PlanarKind::King:
            return htilde_second(a, z) - std::sqrt(0.5) * std::pow(z, -1.5);
        default:
            throw ParameterError("htilde: the Kurth slab has no ansatz density");
    }
}

double htilde_integral(const PlanarAnsatz& a, double z)
{
    if(!(z > 0)) return 0;
    switch(a.kind) {
        case PlanarKind::Polytrope:
            return planar_polytrope_constant(a.k) * std::pow(z, a.k + 1.5) / (a.k + 1.5);
        case PlanarKind::King:
            if(z < 3) return king_series(z, 1, 1.5);
            return htilde(a, z) - 4 * std::sqrt(2.0) / 3 * std::pow(z, 1.5);
        default:
            throw ParameterError("htilde: the Kurth slab has no ansatz density");
    }
}

PlanarSteadyState::PlanarSteadyState(const PlanarAnsatz& ansatz, Eigen::VectorXd x,
                                     Eigen::VectorXd U0, Eigen::VectorXd rho0, double R0,
                                     double E0bar, double M0, Eigen::VectorXd depth)
    : ansatz_(ansatz), x_(std::move(x)), U_(std::move(U0)), y_(std::move(depth)), rho_(std::move(rho0)), R0_(R0),
      E0_(E0bar), M0_(M0)
{
    auto n = x_.size();
    if(y_.size() == 0) y_ = (E0bar - U_.array()).matrix();
    if(n < 4 || U_.size() != n || y_.size() != n || rho_.size() != n)
        throw ParameterError("planar state: inconsistent array lengths");
    if(x_[0] != 0)
        throw ParameterError("planar state: grid must start at x = 0");
    for(Eigen::Index i = 1; i < n; ++i)
        if(!(x_[i] > x_[i - 1]))
            throw ParameterError("planar state: grid must be strictly increasing");
    if(!(R0 > 0) || !(M0 > 0) || std::fabs(x_[n - 1] - R0) > 1e-12 * R0)
        throw ParameterError("planar state: grid must end at R0 > 0 with M0 > 0");
    dU_.resize(n);
    for(Eigen::Index i = 0; i < n; ++i)
        dU_[i] = ansatz_.kind == PlanarKind::Kurth ? x_[i] : slope_from_depth(y_[i]);
}

double PlanarSteadyState::slope_from_depth(double y) const
{
    double kappa = ansatz_.kappa, d = kappa - y;
    if(d <= 0) return 0;
    double D;
    if(d < 1e-3 * kappa) {
        double h0 = htilde(ansatz_, kappa), h1 = htilde_prime(ansatz_, kappa),
               h2 = htilde_second(ansatz_, kappa), h3 = htilde_third(ansatz_, kappa);
        D = d * (h0 - d * (h1 / 2 - d * (h2 / 6 - d * h3 / 24)));
    } else {
        D = htilde_integral(ansatz_, kappa) - htilde_integral(ansatz_, y);
    }
    return std::sqrt(8 * M_PI * std::max(D, 0.0));
}

double PlanarSteadyState::U(double x) const
{
    x = std::fabs(x);
    if(x >= R0_) return 2 * M_PI * M0_ * x;
    auto it = std::upper_bound(x_.data(), x_.data() + x_.size(), x);
    auto i = std::clamp<std::ptrdiff_t>(it - x_.data() - 1, 0, x_.size() - 2);
    double f;
    hermite(x_[i], x_[i + 1], y_[i], y_[i + 1], -dU_[i], -dU_[i + 1], x, &f);
    return E0_ - f;
}

double PlanarSteadyState::dU(double x) const
{
    double s = x < 0 ? -1 : 1;
    x = std::fabs(x);
    if(x >= R0_) return s * 2 * M_PI * M0_;
    if(ansatz_.kind == PlanarKind::Kurth) return s * x;
    return s * slope_from_depth(E0_ - U(x));
}

double PlanarSteadyState::U_mean_slope(double a, double b) const
{
    a = std::fabs(a);
    b = std::fabs(b);
    if(a > b) std::swap(a, b);
    if(a >= R0_) return 2 * M_PI * M0_;
    auto cell = [&](double x) {
        auto it = std::upper_bound(x_.data(), x_.data() + x_.size(), x);
        return std::clamp<std::ptrdiff_t>(it - x_.data() - 1, 0, x_.size() - 2);
    };
    auto slope = [&](std::ptrdiff_t i, double p, double q) {
        return -hermite_mean_slope(x_[i], x_[i + 1], y_[i], y_[i + 1], -dU_[i], -dU_[i + 1], p, q);
    };
    double top = std::min(b, R0_), outer = 2 * M_PI * M0_ * (b - top);
    auto ia = cell(a), ib = cell(top);
    if(b == a) return slope(ia, a, a);
    if(ia == ib) return ((top - a) * slope(ia, a, top) + outer) / (b - a);
    double diff = (x_[ia + 1] - a) * slope(ia, a, x_[ia + 1]) + (y_[ia + 1] - y_[ib])
        + (top - x_[ib]) * slope(ib, x_[ib], top) + outer;
    return diff / (b - a);
}

double PlanarSteadyState::d2U(double x) const
{
    return 4 * M_PI * rho(x);
}

double PlanarSteadyState::rho(double x) const
{
    x = std::fabs(x);
    if(x >= R0_) return 0;
    if(ansatz_.kind == PlanarKind::Kurth) return rho_[0];
    return htilde(ansatz_, E0_ - U(x));
}

double PlanarSteadyState::alpha_prime(double E) const
{
    if(!(E < E0_)) return 0;
    switch(ansatz_.kind) {
        case PlanarKind::Polytrope: return ansatz_.k * std::pow(E0_ - E, ansatz_.k - 1);
        case PlanarKind::King: return std::exp(E0_ - E);
        default: throw ParameterError("alpha_prime: the Kurth slab is not in the ansatz class");
    }
}

double PlanarSteadyState::period_derivative_weight(double x) const
{
    x = std::fabs(x);
    if(ansatz_.kind == PlanarKind::Kurth) return x < R0_ ? 0.0 : 1.0;
    if(x >= R0_) return 1;
    double kappa = ansatz_.kappa, d = x * U_mean_slope(0, x), y = kappa - d;
    double h0 = htilde(ansatz_, kappa), h1 = htilde_prime(ansatz_, kappa);
    if(d < 1e-4 * kappa) {
        // ratio of the Taylor expansions in the depth below the center
        double h2 = htilde_second(ansatz_, kappa), h3 = htilde_third(ansatz_, kappa);
        double num = h1 / 2 - d * (h2 / 3 - d * h3 / 8);
        double den = h0 - d * (h1 / 2 - d * (h2 / 6 - d * h3 / 24));
        return d * num / den;
    }
    double D = htilde_integral(ansatz_, kappa) - htilde_integral(ansatz_, y);
    return 1 - d * htilde(ansatz_, y) / D;
}

PlanarSteadyState solve_planar(const PlanarAnsatz& a, const SolverControl& ctrl)
{
    validate(a);
    if(a.kind == PlanarKind::Kurth)
        return kurth_planar_state(ctrl.grid_nodes);
    if(ctrl.grid_nodes < 16)
        throw ParameterError("solve_planar: grid too small");
    using DP = DormandPrince<2>;
    using State = DP::State;
    auto rhs = [&](double, const State& s) {
        State d;
        d << s[1], -4 * M_PI * htilde(a, s[0]);
        return d;
    };
    State s0(a.kappa, 0);
    // the solution is smooth at x = 0, so absolute accuracy is set by the depth scale
    DP dp(rhs, ctrl.rtol, ctrl.rtol * a.kappa);
    dp.start(0, s0, std::min(ctrl.initial_step, 1e-3 / std::sqrt(1 + htilde(a, a.kappa))));
    double R0 = 0;
    while(true) {
        if(dp.t() > ctrl.max_radius)
            throw SolverError("solve_planar: support does not close within the radius guard");
        dp.step();
        if(dp.y()[0] <= 0) {
            R0 = brent_root([&](double x) { return dp.dense(x)[0]; }, dp.t_old(), dp.t());
            break;
        }
    }

    int n = ctrl.grid_nodes;
    Eigen::VectorXd x(n), y(n), rho(n);
    dp.start(0, s0, std::min(ctrl.initial_step, 1e-3 / std::sqrt(1 + htilde(a, a.kappa))));
    for(int i = 0; i < n; ++i) {
        // nodes cluster quadratically at the support edge
        x[i] = i == n - 1 ? R0 : R0 * std::sin(0.5 * M_PI * i / (n - 1));
        State s = s0;
        if(i > 0) {
            while(dp.t() < x[i]) dp.step(x[i]);
            s = dp.t() == x[i] ? dp.y() : dp.dense(x[i]);
        }
        y[i] = s[0];
        rho[i] = htilde(a, y[i]);
    }
    y[n - 1] = 0;
    rho[n - 1] = 0;
    // near the edge the depth is small and the integrator's absolute rounding dominates;
    // there it is recomputed from R0 - x = int_0^y dz / U0'(z) by Newton iteration
    auto slope = [&](double z) {
        return std::sqrt(8 * M_PI * (htilde_integral(a, a.kappa) - htilde_integral(a, z)));
    };
    const QuadRule& gl = gauss_legendre(24);
    auto distance = [&](double z) {
        double sum = 0;
        for(Eigen::Index j = 0; j < gl.x.size(); ++j) sum += gl.w[j] / slope(0.5 * z * (1 + gl.x[j]));
        return 0.5 * z * sum;
    };
    for(int i = n - 2; i > 0 && y[i] < 1e-2 * a.kappa; --i) {
        double d = R0 - x[i];
        for(int it = 0; it < 8; ++it) {
            double step = (distance(y[i]) - d) * slope(y[i]);
            y[i] -= step;
            if(std::fabs(step) <= 1e-16 * y[i]) break;
        }
        rho[i] = htilde(a, y[i]);
    }
    double M0 = slope(0) / (2 * M_PI);
    double E0 = 2 * M_PI * R0 * M0;
    Eigen::VectorXd U = (E0 - y.array()).matrix();
    return PlanarSteadyState(a, x, U, rho, R0, E0, M0, y);
}

PlanarSteadyState kurth_planar_state(int nodes)
{
    if(nodes < 4) throw ParameterError("kurth_planar_state: too few nodes");
    Eigen::VectorXd x(nodes), U(nodes), y(nodes), rho(nodes);
    for(int i = 0; i < nodes; ++i) {
        x[i] = double(i) / (nodes - 1);
        U[i] = 0.5 * (1 + x[i] * x[i]);
        y[i] = 0.5 * (1 - x[i]) * (1 + x[i]);
        rho[i] = 1 / (4 * M_PI);
    }
    x[nodes - 1] = 1;
    U[nodes - 1] = 1;
    y[nodes - 1] = 0;
    PlanarAnsatz a{PlanarKind::Kurth, -0.5, 0.5};
    return PlanarSteadyState(a, x, U, rho, 1.0, 1.0, 1 / (2 * M_PI), y);
}

namespace {

/// smallest kappa with mass(kappa) = M0, scanning upward in log kappa;
/// the radial King mass is not monotone in kappa
template <class F>
double kappa_root(F&& mass, double M0)
{
    if(!(M0 > 0)) throw ParameterError("M0 must be positive");
    auto f = [&](double t) { return std::log(mass(std::exp(t)) / M0); };
    double lo = -12, flo = f(lo);
    if(flo > 0) throw SolverError("kappa_for_mass: requested mass below the scanned range");
    for(double hi = lo + 0.5; hi <= 12; hi += 0.5) {
        double fhi = f(hi);
        if(fhi >= 0) return std::exp(brent_root(f, lo, hi, flo, fhi, 1e-14));
        lo = hi;
        flo = fhi;
    }
    throw SolverError("kappa_for_mass: could not bracket the requested mass");
}

}  // namespace

double planar_kappa_for_mass(const PlanarAnsatz& a, double M0)
{
    if(a.kind == PlanarKind::Kurth)
        throw ParameterError("kappa_for_mass: the Kurth slab has fixed mass");
    return kappa_root(
        [&](double kappa) {
            PlanarAnsatz b = a;
            b.kappa = kappa;
            return std::sqrt(8 * M_PI * htilde_integral(b, kappa)) / (2 * M_PI);
        },
        M0);
}

double radial_kappa_for_mass(const RadialAnsatz& a, double M0, const SolverControl& ctrl)
{
    if(a.kind != RadialKind::Polytrope && a.kind != RadialKind::King)
        throw ParameterError("kappa_for_mass: benchmark states have fixed mass");
    return kappa_root(
        [&](double kappa) {
            RadialAnsatz b = a;
            b.kappa = kappa;
            return solve_radial(b, ctrl).M0();
        },
        M0);
}

double poisson_residual(const PlanarSteadyState& s)
{
    const Eigen::VectorXd& x = s.x_grid();
    int n = x.size();
    // U0' is odd: mirrored nodes give centered stencils at the center
    Eigen::VectorXd xe(n + 2), de(n + 2);
    xe.tail(n) = x;
    de.tail(n) = s.dU0();
    xe[0] = -x[2], xe[1] = -x[1];
    de[0] = -s.dU0()[2], de[1] = -s.dU0()[1];
    double worst = 0;
    for(int i = 1; i + 1 < n; ++i) {
        double d2 = local_derivative(xe, de, i + 2, 0, n + 1);
        worst = std::max(worst, std::fabs(d2 - 4 * M_PI * s.rho0()[i]));
    }
    return worst;
}

}  // namespace vpgap
