#include "vpgap/steady_radial.hpp"

#include <algorithm>
#include <cmath>

#include "vpgap/errors.hpp"
#include "vpgap/numerics.hpp"
#include "vpgap/ode.hpp"

namespace vpgap {

namespace {

/// 4 pi int_0^sqrt(2y) (exp(y - v^2/2) - 1) v^2 dv
double king_density(double y)
{
    if(y <= 0) return 0;
    if(y < 3) {
        // termwise expansion of the exponential; the closed form cancels badly here
        double term = y / std::tgamma(3.5), sum = 0;
        for(int n = 1; n < 400 && term > 1e-18 * sum; ++n) {
            sum += term;
            term *= y / (n + 2.5);
        }
        return M_PI * std::sqrt(M_PI) * std::pow(2 * y, 1.5) * sum;
    }
    double s = std::sqrt(2 * y);
    return 4 * M_PI * (std::exp(y) * std::sqrt(M_PI / 2) * std::erf(std::sqrt(y)) - s - s * s * s / 3);
}

}  // namespace

std::string to_string(RadialKind kind)
{
    switch(kind) {
        case RadialKind::Polytrope: return "polytrope";
        case RadialKind::King: return "king";
        case RadialKind::Kurth: return "kurth";
        case RadialKind::Homogeneous: return "homogeneous";
    }
    return "unknown";
}

RadialKind radial_kind_from_string(const std::string& name)
{
    if(name == "polytrope") return RadialKind::Polytrope;
    if(name == "king") return RadialKind::King;
    if(name == "kurth") return RadialKind::Kurth;
    if(name == "homogeneous") return RadialKind::Homogeneous;
    throw ParameterError("unknown radial ansatz kind '" + name + "'");
}

void validate(const RadialAnsatz& a)
{
    if(!(a.kappa > 0))
        throw ParameterError("kappa must be positive");
    if(a.kind != RadialKind::Polytrope)
        return;
    if(!(a.k > 0) || !(a.l > -1) || !(a.k < a.l + 3.5) || !(a.k + a.l + 0.5 >= 0))
        throw ParameterError("polytrope exponents outside k > 0, l > -1, k < l + 7/2, k + l + 1/2 >= 0");
    if(!(a.L0 >= 0))
        throw ParameterError("L0 must be nonnegative");
    if(a.L0 == 0 && a.l != 0)
        throw ParameterError("L0 = 0 requires l = 0");
}

double polytrope_constant(double k, double l)
{
    return M_PI * std::pow(2.0, l + 1.5) * std::beta(l + 1, k + 1) * std::beta(0.5, k + l + 2);
}

double macroscopic_density(const RadialAnsatz& a, double y, double r)
{
    switch(a.kind) {
        case RadialKind::Polytrope: {
            double ye = a.L0 > 0 ? y - a.L0 / (2 * r * r) : y;
            if(!(ye > 0)) return 0;
            double rl = a.l == 0 ? 1.0 : std::pow(r, 2 * a.l);
            return polytrope_constant(a.k, a.l) * rl * std::pow(ye, a.k + a.l + 1.5);
        }
        case RadialKind::King:
            return king_density(y);
        default:
            throw ParameterError("macroscopic_density: benchmark states have no ansatz density");
    }
}

double phi_prime_abs(const RadialAnsatz& a, double E0, double E, double L)
{
    switch(a.kind) {
        case RadialKind::Polytrope:
            if(!(E < E0) || !(L > a.L0)) return 0;
            return a.k * std::pow(E0 - E, a.k - 1) * (a.l == 0 ? 1.0 : std::pow(L - a.L0, a.l));
        case RadialKind::King:
            return E < E0 ? std::exp(E0 - E) : 0;
        case RadialKind::Kurth: {
            double X = -2 - 2 * E + L;
            if(!(X > 0) || !(L < 1)) return 0;
            return 3 / (4 * M_PI * M_PI * M_PI) * std::pow(X, -1.5);
        }
        default:
            throw ParameterError("phi_prime_abs: no distribution function for this state");
    }
}

RadialSteadyState::RadialSteadyState(const RadialAnsatz& ansatz, Eigen::VectorXd r,
                                     Eigen::VectorXd U0, Eigen::VectorXd rho0,
                                     Eigen::VectorXd m0, double R0, double E0, double M0,
                                     Eigen::VectorXd depth)
    : ansatz_(ansatz), r_(std::move(r)), U_(std::move(U0)), y_(std::move(depth)), rho_(std::move(rho0)),
      m_(std::move(m0)), R0_(R0), E0_(E0), M0_(M0)
{
    auto n = r_.size();
    if(y_.size() == 0) y_ = (E0 - U_.array()).matrix();
    if(n < 4 || U_.size() != n || y_.size() != n || rho_.size() != n || m_.size() != n)
        throw ParameterError("radial state: inconsistent array lengths");
    if(r_[0] != 0)
        throw ParameterError("radial state: grid must start at r = 0");
    for(Eigen::Index i = 1; i < n; ++i)
        if(!(r_[i] > r_[i - 1]))
            throw ParameterError("radial state: grid must be strictly increasing");
    if(!(R0 > 0) || !(M0 > 0) || std::fabs(r_[n - 1] - R0) > 1e-12 * R0)
        throw ParameterError("radial state: grid must end at R0 > 0 with M0 > 0");
    if(ansatz_.kind == RadialKind::Polytrope && ansatz_.L0 > 0)
        r_inner_ = std::sqrt(ansatz_.L0 / (2 * ansatz_.kappa));
    dU_.resize(n);
    dm_.resize(n);
    for(Eigen::Index i = 0; i < n; ++i) {
        dU_[i] = r_[i] > 0 ? m_[i] / (r_[i] * r_[i]) : 0;
        dm_[i] = 4 * M_PI * r_[i] * r_[i] * rho_[i];
    }
    rho_max_ = rho_.maxCoeff();
}

std::size_t RadialSteadyState::cell(double r) const
{
    auto it = std::upper_bound(r_.data(), r_.data() + r_.size(), r);
    std::ptrdiff_t i = it - r_.data() - 1;
    return std::clamp<std::ptrdiff_t>(i, 0, r_.size() - 2);
}

double RadialSteadyState::U(double r) const
{
    if(r >= R0_) return -M0_ / r;
    auto i = cell(r);
    double f;
    hermite(r_[i], r_[i + 1], y_[i], y_[i + 1], -dU_[i], -dU_[i + 1], r, &f);
    return E0_ - f;
}

double RadialSteadyState::U_mean_slope(double a, double b) const
{
    if(a > b) std::swap(a, b);
    if(a >= R0_) return M0_ / (a * b);
    auto part = [&](double x, double y) {
        auto i = cell(x);
        return (x - y) * hermite_mean_slope(r_[i], r_[i + 1], y_[i], y_[i + 1], -dU_[i], -dU_[i + 1], x, y);
    };
    double top = std::min(b, R0_), outer = b > R0_ ? M0_ * (b - R0_) / (R0_ * b) : 0;
    auto ia = cell(a), ib = cell(top);
    if(ia == ib) {
        double inner = a == top ? 0 : part(a, top);
        if(b == a) return -hermite_mean_slope(r_[ia], r_[ia + 1], y_[ia], y_[ia + 1], -dU_[ia], -dU_[ia + 1], a, a);
        return (inner + outer) / (b - a);
    }
    double diff = part(a, r_[ia + 1]) + (y_[ia + 1] - y_[ib]) + part(r_[ib], top) + outer;
    return diff / (b - a);
}

double RadialSteadyState::dU(double r) const
{
    if(r >= R0_) return M0_ / (r * r);
    return r > 0 ? m(r) / (r * r) : 0;
}

double RadialSteadyState::m(double r) const
{
    if(r >= R0_) return M0_;
    if(r <= r_inner_) return 0;
    auto i = cell(r);
    double f;
    hermite(r_[i], r_[i + 1], m_[i], m_[i + 1], dm_[i], dm_[i + 1], r, &f);
    return std::max(f, 0.0);
}

double RadialSteadyState::rho(double r) const
{
    if(r >= R0_ || r < r_inner_) return 0;
    if(ansatz_.kind == RadialKind::Kurth || ansatz_.kind == RadialKind::Homogeneous)
        return rho_[0];
    return macroscopic_density(ansatz_, E0_ - U(r), r);
}

double RadialSteadyState::energy_cutoff(double L) const
{
    return ansatz_.kind == RadialKind::Kurth ? -1 + L / 2 : E0_;
}

double RadialSteadyState::phi_prime(double E, double L) const
{
    return phi_prime_abs(ansatz_, E0_, E, L);
}

RadialSteadyState solve_radial(const RadialAnsatz& a, const SolverControl& ctrl)
{
    validate(a);
    if(a.kind != RadialKind::Polytrope && a.kind != RadialKind::King)
        throw ParameterError("solve_radial: only polytrope and King ansatz functions");
    if(ctrl.grid_nodes < 16 || ctrl.vacuum_nodes < 2)
        throw ParameterError("solve_radial: grid too small");
    using DP = DormandPrince<2>;
    using State = DP::State;
    const double L0 = a.kind == RadialKind::Polytrope ? a.L0 : 0.0;
    const double r_in = L0 > 0 ? std::sqrt(L0 / (2 * a.kappa)) : 0.0;

    auto rhs = [&](double r, const State& s) {
        State d;
        d[0] = r > 0 ? -s[1] / (r * r) : 0;
        d[1] = 4 * M_PI * r * r * macroscopic_density(a, s[0], r);
        return d;
    };
    auto edge = [&](double r, const State& s) { return L0 > 0 ? s[0] - L0 / (2 * r * r) : s[0]; };

    double r_start;
    State s0;
    if(r_in > 0) {
        r_start = r_in;
        s0 << a.kappa, 0;
    } else {
        double rc = macroscopic_density(a, a.kappa, 0);
        r_start = 1e-5 * std::sqrt(a.kappa / (4 * M_PI * rc));
        s0 << a.kappa - 2 * M_PI / 3 * rc * r_start * r_start,
              4 * M_PI / 3 * rc * r_start * r_start * r_start;
    }

    // pass 1: locate the outer edge of the support
    DP dp(rhs, ctrl.rtol, ctrl.atol);
    dp.start(r_start, s0, std::min(ctrl.initial_step, 0.1 * std::max(r_start, 1e-3)));
    double R0 = 0;
    while(true) {
        if(dp.t() > ctrl.max_radius)
            throw SolverError("solve_radial: support does not close within the radius guard");
        dp.step();
        if(edge(dp.t(), dp.y()) <= 0) {
            R0 = brent_root([&](double r) { return edge(r, dp.dense(r)); }, dp.t_old(), dp.t());
            break;
        }
    }

    // pass 2: resample on the output grid, stepping onto every node
    std::vector<double> grid{0};
    if(r_in > 0)
        for(int i = 1; i < ctrl.vacuum_nodes; ++i)
            grid.push_back(r_in * i / (ctrl.vacuum_nodes - 1));
    // nodes cluster quadratically at the support edges, where rho0 vanishes like a power
    for(int i = 1; i < ctrl.grid_nodes; ++i) {
        double t = double(i) / (ctrl.grid_nodes - 1);
        double u = r_in > 0 ? 0.5 * (1 - std::cos(M_PI * t)) : std::sin(0.5 * M_PI * t);
        grid.push_back(r_in + (R0 - r_in) * u);
    }
    grid.back() = R0;
    Eigen::Index n = grid.size();
    Eigen::VectorXd r(n), y(n), m(n), rho(n);
    dp.start(r_start, s0, std::min(ctrl.initial_step, 0.1 * std::max(r_start, 1e-3)));
    for(Eigen::Index i = 0; i < n; ++i) {
        r[i] = grid[i];
        State s;
        if(r[i] <= r_start) {
            if(r_in > 0) {
                s << a.kappa, 0;
            } else {
                double rc = macroscopic_density(a, a.kappa, 0), ri = r[i];
                s << a.kappa - 2 * M_PI / 3 * rc * ri * ri, 4 * M_PI / 3 * rc * ri * ri * ri;
            }
        } else {
            while(dp.t() < r[i]) dp.step(r[i]);
            s = dp.t() == r[i] ? dp.y() : dp.dense(r[i]);
        }
        y[i] = s[0];
        m[i] = s[1];
        rho[i] = (r[i] > 0 || L0 == 0) ? macroscopic_density(a, y[i], r[i]) : 0;
    }
    rho[n - 1] = 0;
    double M0 = m[n - 1];
    double E0 = y[n - 1] - M0 / R0;
    Eigen::VectorXd U = (E0 - y.array()).matrix();
    U[n - 1] = -M0 / R0;
    RadialAnsatz out = a;
    if(a.kind == RadialKind::King) {
        out.k = 0;
        out.l = 0;
        out.L0 = 0;
    }
    return RadialSteadyState(out, r, U, rho, m, R0, E0, M0, y);
}

RadialSteadyState homogeneous_state(double rho, double R, int nodes)
{
    if(!(rho > 0) || !(R > 0) || nodes < 4)
        throw ParameterError("homogeneous_state: rho, R must be positive");
    double w2 = 4 * M_PI * rho / 3, M = w2 * R * R * R;
    Eigen::VectorXd r(nodes), U(nodes), y(nodes), dens(nodes), m(nodes);
    for(int i = 0; i < nodes; ++i) {
        r[i] = R * i / (nodes - 1);
        U[i] = 0.5 * w2 * r[i] * r[i] - 1.5 * w2 * R * R;
        y[i] = 0.5 * w2 * (R - r[i]) * (R + r[i]);
        dens[i] = rho;
        m[i] = w2 * r[i] * r[i] * r[i];
    }
    r[nodes - 1] = R;
    U[nodes - 1] = -M / R;
    y[nodes - 1] = 0;
    m[nodes - 1] = M;
    RadialAnsatz a{RadialKind::Homogeneous, 0, 0, 0, 0.5 * w2 * R * R};
    return RadialSteadyState(a, r, U, dens, m, R, -M / R, M, y);
}

RadialSteadyState kurth_radial_state(int nodes)
{
    RadialSteadyState ball = homogeneous_state(3 / (4 * M_PI), 1.0, nodes);
    RadialAnsatz a = ball.ansatz();
    a.kind = RadialKind::Kurth;
    return RadialSteadyState(a, ball.r_grid(), ball.U0(), ball.rho0(), ball.m0(), 1.0, -1.0, 1.0,
                             ball.depth());
}

double scaling_exponent(double k, double l)
{
    return (2 * (k + l) + 1) / (2 * l + 2);
}

RadialSteadyState scale_state(const RadialSteadyState& s, double sigma)
{
    const RadialAnsatz& a = s.ansatz();
    if(a.kind != RadialKind::Polytrope)
        throw ParameterError("scale_state: the scaling family exists for polytropes only");
    if(!(sigma > 0))
        throw ParameterError("scale_state: sigma must be positive");
    double e = scaling_exponent(a.k, a.l);
    double fr = std::pow(sigma, e), fy = std::pow(sigma, -2.0), fm = std::pow(sigma, e - 2),
           frho = std::pow(sigma, -2 - 2 * e);
    RadialAnsatz b = a;
    b.kappa = a.kappa * fy;
    b.L0 = a.L0 * std::pow(sigma, 2 * e - 2);
    Eigen::VectorXd r = s.r_grid() * fr;
    r[r.size() - 1] = s.R0() * fr;
    return RadialSteadyState(b, r, s.U0() * fy, s.rho0() * frho, s.m0() * fm, s.R0() * fr,
                             s.E0() * fy, s.M0() * fm, s.depth() * fy);
}

double poisson_residual(const RadialSteadyState& s)
{
    const Eigen::VectorXd& r = s.r_grid();
    const Eigen::VectorXd& m = s.m0();
    int n = r.size();
    double worst = 0;
    if(!s.has_inner_vacuum()) {
        // m0/r^3 is even in r, so mirrored nodes give centered stencils at the center
        // and m0' / r^2 = 3g + r g' avoids dividing a stencil error by r^2
        Eigen::VectorXd x(n + 2), g(n + 2);
        for(int i = 0; i < n; ++i) {
            x[i + 2] = r[i];
            g[i + 2] = i == 0 ? 4 * M_PI * s.rho0()[0] / 3 : m[i] / (r[i] * r[i] * r[i]);
        }
        x[0] = -r[2], x[1] = -r[1];
        g[0] = g[4], g[1] = g[3];
        for(int i = 1; i + 1 < n; ++i) {
            double dg = local_derivative(x, g, i + 2, 0, n + 1);
            worst = std::max(worst, std::fabs(3 * g[i + 2] + r[i] * dg - 4 * M_PI * s.rho0()[i]));
        }
        return worst;
    }
    int split = 0;
    // stencils do not straddle the inner vacuum edge, where m0 is only C^2
    while(split + 1 < n && r[split] < s.inner_radius()) ++split;
    for(int i = 1; i + 1 < n; ++i) {
        double dm = i <= split ? local_derivative(r, m, i, 0, split)
                               : local_derivative(r, m, i, split, n - 1);
        worst = std::max(worst, std::fabs(dm / (r[i] * r[i]) - 4 * M_PI * s.rho0()[i]));
    }
    return worst;
}

}  // namespace vpgap
