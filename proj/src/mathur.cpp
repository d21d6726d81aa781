#include "vpgap/mathur.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "vpgap/errors.hpp"

namespace vpgap {

namespace {

constexpr int kTile = 32;
constexpr std::size_t kBatch = 32;  ///< tiles reduced together, bounds the memory of partial sums
constexpr int kPieceNodes = 8;

/// one orbit seen as a curve s in [0, 1] -> position, with its phase theta(s)
struct OrbitCurve {
    std::function<double(double)> pos, dpos, theta, s_of_pos;
    double pos_min = 0, pos_max = 0;
};

/// S(k-1, j) = int over cell j of sin(m pi k theta) d pos for k = 1..K, on pieces short
/// enough that the highest harmonic makes at most half an oscillation
Eigen::MatrixXd harmonic_integrals(const OrbitCurve& c, const Eigen::VectorXd& edges, int K, double m)
{
    const int n_r = int(edges.size()) - 1;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K, n_r);
    constexpr int probe = 64;
    double slope = 0, prev = c.theta(0);
    for(int i = 1; i <= probe; ++i) {
        double th = c.theta(double(i) / probe);
        slope = std::max(slope, (th - prev) * probe);
        prev = th;
    }
    int pieces = std::max(1, int(std::ceil(1.25 * slope * m * K)));
    std::vector<double> br;
    br.reserve(pieces + n_r + 1);
    for(int i = 0; i <= pieces; ++i) br.push_back(double(i) / pieces);
    for(int j = 1; j < n_r; ++j)
        if(edges[j] > c.pos_min && edges[j] < c.pos_max) br.push_back(c.s_of_pos(edges[j]));
    std::sort(br.begin(), br.end());
    const QuadRule& gl = gauss_legendre(kPieceNodes);
    std::vector<double> sk(K);
    for(std::size_t p = 0; p + 1 < br.size(); ++p) {
        double a = br[p], b = br[p + 1];
        if(!(b > a)) continue;
        double mid = c.pos(0.5 * (a + b));
        int cell = int(std::upper_bound(edges.data(), edges.data() + edges.size(), mid) - edges.data()) - 1;
        cell = std::clamp(cell, 0, n_r - 1);
        for(int q = 0; q < kPieceNodes; ++q) {
            double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[q];
            double w = 0.5 * (b - a) * gl.w[q] * c.dpos(s);
            double ph = m * M_PI * c.theta(s), s1 = std::sin(ph), cs = 2 * std::cos(ph);
            double s_prev = 0, s_cur = s1;
            for(int k = 0; k < K; ++k) {
                S(k, cell) += w * s_cur;
                double nxt = cs * s_cur - s_prev;
                s_prev = s_cur;
                s_cur = nxt;
            }
        }
    }
    return S;
}

/// quadrature node before the orbit is known
struct NodeSpec {
    double E, L, qw;
};

/// evaluates T and the harmonic integrals of one node
using NodeEval = std::function<double(const NodeSpec&, int K, Eigen::MatrixXd& S)>;

void symmetrize(Eigen::MatrixXd& A)
{
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
}

/// share of the last harmonic octave in the top mode: G^T tail G / G^T A G
double tail_share(const MathurTables& t, const MathurForm& f, const Eigen::VectorXd* mode = nullptr)
{
    Eigen::VectorXd G = mode ? *mode : m_lambda(f).G;
    double full = G.dot(f.A * G);
    return full > 0 ? G.dot(t.tail * G) / full : 0;
}

MathurTables build_tables(MathurTables t, const std::vector<NodeSpec>& specs, const NodeEval& eval)
{
    const int n_r = int(t.edges.size()) - 1;
    const double c = t.frequency, top_ref = c / (t.T_ref * t.T_ref);
    const double series_eps = std::numeric_limits<double>::epsilon() / 4;
    for(int K = t.disc.K_max;; K *= 2) {
        t.K = K;
        const std::size_t n_tiles = (specs.size() + kTile - 1) / kTile;
        struct Tile {
            std::vector<FormNode> nodes;
            std::vector<Eigen::MatrixXd> B;
            Eigen::MatrixXd tail;
            int skipped = 0;
        };
        auto work = [&](std::size_t ti, Tile& tile) {
            tile.tail = Eigen::MatrixXd::Zero(n_r, n_r);
            std::vector<Eigen::MatrixXd> S_all;
            std::size_t lo = ti * kTile, hi = std::min(specs.size(), lo + kTile);
            for(std::size_t i = lo; i < hi; ++i) {
                Eigen::MatrixXd S;
                double T;
                try {
                    T = eval(specs[i], K, S);
                } catch(const NoOrbitError&) {
                    ++tile.skipped;
                    continue;
                }
                FormNode nd;
                nd.E = specs[i].E;
                nd.L = specs[i].L;
                nd.T = T;
                nd.weight = specs[i].qw / T;
                nd.S1 = S.row(0).transpose();
                tile.nodes.push_back(std::move(nd));
                S_all.push_back(std::move(S));
            }
            // B_n = sum weight T^2 / (c k^2) q_k^n S_k S_k^T with q_k = top_ref T^2 / (c k^2)
            for(int n = 0;; ++n) {
                std::vector<std::pair<std::size_t, int>> cols;
                std::vector<double> scale;
                for(std::size_t i = 0; i < tile.nodes.size(); ++i) {
                    const FormNode& nd = tile.nodes[i];
                    for(int k = 2; k <= K; ++k) {
                        double base = nd.T * nd.T / (c * k * k), q = top_ref * base;
                        double f = nd.weight * base * std::pow(q, n);
                        if(n > 0 && std::pow(q, n) < series_eps) break;
                        cols.emplace_back(i, k);
                        scale.push_back(std::sqrt(f));
                    }
                }
                if(cols.empty()) break;
                Eigen::MatrixXd Z(n_r, cols.size());
                for(std::size_t j = 0; j < cols.size(); ++j)
                    Z.col(j) = scale[j] * S_all[cols[j].first].row(cols[j].second - 1).transpose();
                Eigen::MatrixXd Bn = Eigen::MatrixXd::Zero(n_r, n_r);
                Bn.selfadjointView<Eigen::Lower>().rankUpdate(Z);
                tile.B.push_back(std::move(Bn));
                if(n == 0) {
                    std::vector<Eigen::Index> hi_cols;
                    for(std::size_t j = 0; j < cols.size(); ++j)
                        if(2 * cols[j].second > K) hi_cols.push_back(Eigen::Index(j));
                    Eigen::MatrixXd Zt(n_r, hi_cols.size());
                    for(std::size_t j = 0; j < hi_cols.size(); ++j) Zt.col(j) = Z.col(hi_cols[j]);
                    tile.tail.selfadjointView<Eigen::Lower>().rankUpdate(Zt);
                }
            }
        };
        t.nodes.clear();
        t.B.clear();
        t.tail = Eigen::MatrixXd::Zero(n_r, n_r);
        t.skipped_nodes = 0;
        for(std::size_t first = 0; first < n_tiles; first += kBatch) {
            std::vector<Tile> tiles(std::min(kBatch, n_tiles - first));
            parallel_for(tiles.size(), [&](std::size_t i) { work(first + i, tiles[i]); });
            for(Tile& tile : tiles) {
                for(auto& nd : tile.nodes) t.nodes.push_back(std::move(nd));
                if(t.B.size() < tile.B.size()) t.B.resize(tile.B.size(), Eigen::MatrixXd::Zero(n_r, n_r));
                for(std::size_t n = 0; n < tile.B.size(); ++n) t.B[n] += tile.B[n];
                t.tail += tile.tail;
                t.skipped_nodes += tile.skipped;
            }
        }
        for(auto& Bn : t.B) symmetrize(Bn);
        symmetrize(t.tail);
        double T_max = t.T_ref;
        for(const auto& nd : t.nodes) T_max = std::max(T_max, nd.T);
        t.gap_top = c / (T_max * T_max);
        if(t.nodes.empty()) {
            t.tail_estimate = 0;
            return t;
        }
        t.tail_estimate = tail_share(t, assemble_form(t, 0.5 * t.gap_top));
        if(t.tail_estimate <= t.disc.k_tol) return t;
        if(2 * K > t.disc.K_limit)
            throw AccuracyError("mathur: harmonic truncation did not meet k_tol", t.tail_estimate,
                                t.disc.k_tol);
    }
}

/// quadrature in E on (lo, hi), graded toward hi as E = hi - (hi - lo) t^grading with uniform and
/// halving panels in t. Panels are split where E crosses a breakpoint; there a new cell enters the
/// orbit and the integrand has a one-sided 3/2 power, so the panel below the break is clustered
/// quadratically toward it.
QuadRule energy_rule(double lo, double hi, std::vector<double> breaks, const Discretization& d)
{
    const double g = d.grading, span = hi - lo;
    std::vector<std::pair<double, bool>> te{{0, false}};
    for(int m = d.levels; m >= 1; --m) te.push_back({std::pow(0.5, m) / d.n_E, false});
    for(int i = 1; i <= d.n_E; ++i) te.push_back({double(i) / d.n_E, false});
    for(double e : breaks)
        if(e > lo && e < hi) te.push_back({std::pow((hi - e) / span, 1 / g), true});
    std::sort(te.begin(), te.end());
    const QuadRule& gl = gauss_legendre(d.per_panel);
    std::vector<double> x, w;
    for(std::size_t p = 0; p + 1 < te.size(); ++p) {
        double a = te[p].first, b = te[p + 1].first;
        if(!(b > a)) continue;
        for(int q = 0; q < d.per_panel; ++q) {
            double tau = 0.5 * (1 + gl.x[q]), t, dt;
            if(te[p + 1].second) {
                t = b - (b - a) * (1 - tau) * (1 - tau);
                dt = 2 * (b - a) * (1 - tau);
            } else {
                t = a + (b - a) * tau;
                dt = b - a;
            }
            x.push_back(hi - span * std::pow(t, g));
            w.push_back(0.5 * gl.w[q] * dt * span * g * std::pow(t, g - 1));
        }
    }
    return {Eigen::Map<Eigen::ArrayXd>(x.data(), x.size()), Eigen::Map<Eigen::ArrayXd>(w.data(), w.size())};
}

Eigen::VectorXd uniform_edges(double a, double b, int n)
{
    return Eigen::VectorXd::LinSpaced(n + 1, a, b);
}

}  // namespace

void validate(const Discretization& d)
{
    if(d.n_r < 16) throw ParameterError("Discretization: n_r must be at least 16");
    if(d.K_max < 4) throw ParameterError("Discretization: K_max must be at least 4");
    if(!(d.grading >= 1)) throw ParameterError("Discretization: grading exponent must be at least 1");
    if(d.n_E < 1 || d.n_L < 1 || d.per_panel < 1 || d.levels < 0)
        throw ParameterError("Discretization: panel counts must be positive");
    if(!(d.k_tol > 0)) throw ParameterError("Discretization: k_tol must be positive");
    if(d.K_limit < d.K_max) throw ParameterError("Discretization: K_limit below K_max");
}

MathurTables mathur_tables_radial(const RadialSteadyState& s, double T_sup, const Discretization& d)
{
    validate(d);
    if(s.ansatz().kind != RadialKind::Polytrope && s.ansatz().kind != RadialKind::King)
        throw ParameterError("mathur: radial forms need a polytrope or King state");
    if(!(T_sup > 0)) throw ParameterError("mathur: T_sup must be positive");
    MathurTables t;
    t.planar = false;
    t.disc = d;
    t.frequency = 4 * M_PI * M_PI;
    t.T_ref = T_sup;
    t.edges = uniform_edges(s.inner_radius(), s.R0(), d.n_r);
    t.W.resize(d.n_r);
    for(int j = 0; j < d.n_r; ++j) {
        double a = t.edges[j], b = t.edges[j + 1];
        t.W[j] = (b - a) * (a * a + a * b + b * b) / 3;
    }

    const double L0 = s.ansatz().kind == RadialKind::Polytrope ? s.L0() : 0.0;
    const double Lmax = max_angular_momentum(s);
    // geometric panels toward L0 only where (L - L0)^l is singular; for smooth phi in L
    // they would reach almost radial orbits with L ~ 1e-14
    const bool singular_L = s.ansatz().kind == RadialKind::Polytrope && s.ansatz().l < 0;
    const QuadRule rv = graded_rule(d.n_L, d.grading, d.per_panel, singular_L ? d.levels : 0, 0.5);
    std::vector<NodeSpec> specs;
    int circular = 0;
    for(Eigen::Index j = 0; j < rv.x.size(); ++j) {
        double L = L0 + (Lmax - L0) * rv.x[j];
        double Emin = minimal_energy(s, L), Ecut = s.energy_cutoff(L);
        if(!(Ecut > Emin)) continue;
        std::vector<double> breaks;
        for(int e = 0; e <= d.n_r; ++e)
            if(t.edges[e] > 0) breaks.push_back(effective_potential(s, t.edges[e], L));
        const QuadRule ru = energy_rule(Emin, Ecut, breaks, d);
        for(Eigen::Index i = 0; i < ru.x.size(); ++i) {
            double E = ru.x[i];
            // nearly circular orbits carry S_k = O(r_+ - r_-) and resolve the cell structure of
            // the tabulated potential poorly; their share of the form is below 1e-7
            if(E - Emin < 1e-7 * (Ecut - Emin)) {
                ++circular;
                continue;
            }
            double jac = (Lmax - L0) * ru.w[i] * rv.w[j];
            specs.push_back({E, L, 32 * M_PI * M_PI * s.phi_prime(E, L) * jac});
        }
    }
    const Eigen::VectorXd edges = t.edges;
    NodeEval eval = [&s, &d, edges](const NodeSpec& n, int K, Eigen::MatrixXd& S) {
        RadialOrbit o(s, n.E, n.L, d.quad);
        OrbitCurve c;
        c.pos = [&o](double u) { return o.r_of_s(u); };
        c.dpos = [&o](double u) { return o.dr_ds(u); };
        c.theta = [&o](double u) { return o.theta_of_s(u); };
        c.s_of_pos = [&o](double r) { return o.s_of_r(r); };
        c.pos_min = o.info().r_minus;
        c.pos_max = o.info().r_plus;
        S = harmonic_integrals(c, edges, K, 2);
        return o.T();
    };
    MathurTables out = build_tables(std::move(t), specs, eval);
    out.skipped_nodes += circular;
    return out;
}

MathurTables mathur_tables_planar(const PlanarSteadyState& s, const Discretization& d)
{
    validate(d);
    if(s.ansatz().kind == PlanarKind::Kurth)
        throw ParameterError("mathur: planar forms need a polytrope or King state");
    MathurTables t;
    t.planar = true;
    t.disc = d;
    t.frequency = 16 * M_PI * M_PI;
    t.T_ref = period_planar(s, s.E0bar(), d.quad);
    t.edges = uniform_edges(0, s.R0(), d.n_r);
    t.W = t.edges.tail(d.n_r) - t.edges.head(d.n_r);

    std::vector<double> breaks;
    for(int e = 1; e < d.n_r; ++e) breaks.push_back(s.U(t.edges[e]));
    const QuadRule ru = energy_rule(s.U_center(), s.E0bar(), breaks, d);
    std::vector<NodeSpec> specs;
    for(Eigen::Index i = 0; i < ru.x.size(); ++i)
        specs.push_back({ru.x[i], 0, 64 * M_PI * s.alpha_prime(ru.x[i]) * ru.w[i]});
    const Eigen::VectorXd edges = t.edges;
    NodeEval eval = [&s, &d, edges](const NodeSpec& n, int K, Eigen::MatrixXd& S) {
        PlanarOrbit o(s, n.E, d.quad);
        const double T = o.T();
        OrbitCurve c;
        c.pos = [&o](double u) { return o.x_of_s(u); };
        c.dpos = [&o](double u) { return 0.5 * M_PI * o.x_plus() * std::cos(0.5 * M_PI * u); };
        c.theta = [&o, T](double u) { return 0.25 + o.quarter()(u) / T; };
        c.s_of_pos = [&o](double x) { return o.s_of_x(x); };
        c.pos_min = 0;
        c.pos_max = o.x_plus();
        S = harmonic_integrals(c, edges, K, 4);
        return T;
    };
    return build_tables(std::move(t), specs, eval);
}

MathurForm assemble_form(const MathurTables& t, double lambda)
{
    if(!(lambda > 0) || !(lambda < t.gap_top))
        throw DomainError("mathur: lambda outside the principal gap");
    const Eigen::Index n_r = t.W.size();
    const double c = t.frequency, tau = lambda * t.T_ref * t.T_ref / c;
    MathurForm f;
    f.lambda = lambda;
    f.W = t.W;
    f.A = Eigen::MatrixXd::Zero(n_r, n_r);
    for(auto it = t.B.rbegin(); it != t.B.rend(); ++it) f.A = tau * f.A + *it;
    if(!t.nodes.empty()) {
        Eigen::MatrixXd Z(n_r, t.nodes.size());
        for(std::size_t i = 0; i < t.nodes.size(); ++i) {
            const FormNode& nd = t.nodes[i];
            Z.col(i) = std::sqrt(nd.weight / (c / (nd.T * nd.T) - lambda)) * nd.S1;
        }
        Eigen::MatrixXd low = Eigen::MatrixXd::Zero(n_r, n_r);
        low.selfadjointView<Eigen::Lower>().rankUpdate(Z);
        symmetrize(low);
        f.A += low;
    }
    return f;
}

MathurForm assemble_form_radial(const RadialSteadyState& s, const PeriodSurface& surface, double lambda,
                                const Discretization& d)
{
    return assemble_form(mathur_tables_radial(s, surface.T_sup, d), lambda);
}

MathurForm assemble_form_planar(const PlanarSteadyState& s, double lambda, const Discretization& d)
{
    return assemble_form(mathur_tables_planar(s, d), lambda);
}

double symmetry_residual(const Eigen::MatrixXd& A)
{
    double m = A.cwiseAbs().maxCoeff();
    return m > 0 ? (A - A.transpose()).cwiseAbs().maxCoeff() / m : 0;
}

MLambda m_lambda(const MathurForm& f)
{
    const Eigen::VectorXd& W = f.W;
    if(W.size() == 0 || !(W.minCoeff() > 1e-14 * W.maxCoeff()))
        throw DiscretizationError("m_lambda: singular metric");
    Eigen::VectorXd wi = W.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd C = wi.asDiagonal() * f.A * wi.asDiagonal();
    symmetrize(C);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if(es.info() != Eigen::Success) throw SolverError("m_lambda: eigensolver failed");
    Eigen::Index top = C.rows() - 1;
    MLambda out;
    out.M = std::max(0.0, es.eigenvalues()[top]);
    out.G = wi.asDiagonal() * es.eigenvectors().col(top);
    Eigen::Index imax;
    out.G.cwiseAbs().maxCoeff(&imax);
    if(out.G[imax] < 0) out.G = -out.G;
    return out;
}

double form_value(const MathurForm& f, const Eigen::VectorXd& G)
{
    double n = G.dot(f.W.asDiagonal() * G);
    return n > 0 ? G.dot(f.A * G) / n : 0;
}

std::string to_string(ScanStatus s)
{
    switch(s) {
        case ScanStatus::Found: return "found";
        case ScanStatus::None: return "none";
        case ScanStatus::Inconclusive: return "inconclusive";
    }
    return "";
}

MathurScan scan(const MathurTables& t, const ScanOptions& opt)
{
    if(opt.n_lambda < 2) throw ParameterError("scan: need at least two lambda points");
    if(!(opt.eps > 0 && opt.eps < 0.5)) throw ParameterError("scan: eps in (0, 1/2)");
    if(!(opt.rel_tol > 0)) throw ParameterError("scan: rel_tol must be positive");
    MathurScan out;
    out.gap_top = t.gap_top;
    const int n = opt.n_lambda;
    out.lambda.resize(n);
    out.M.resize(n);
    out.converged.assign(n, 0);
    const double a = std::log(1 - opt.eps), b = std::log(opt.eps);
    for(int i = 0; i < n; ++i) out.lambda[i] = t.gap_top * (1 - std::exp(a + (b - a) * i / (n - 1)));
    parallel_for(n, [&](std::size_t i) {
        MathurForm f = assemble_form(t, out.lambda[i]);
        MLambda m = m_lambda(f);
        out.M[i] = m.M;
        out.converged[i] = tail_share(t, f, &m.G) <= t.disc.k_tol;
    });
    out.max_M = out.M.maxCoeff();
    int first = -1;
    for(int i = 0; i < n; ++i)
        if(out.M[i] >= 1) {
            first = i;
            break;
        }
    if(first < 0) {
        out.status = out.max_M > opt.near_one ? ScanStatus::Inconclusive : ScanStatus::None;
        return out;
    }
    if(first == 0) {
        // the crossing lies below the scanned range
        out.status = ScanStatus::Inconclusive;
        return out;
    }
    auto g = [&](double lam) { return m_lambda(assemble_form(t, lam)).M - 1; };
    double lo = out.lambda[first - 1], hi = out.lambda[first];
    double root = brent_root(g, lo, hi, out.M[first - 1] - 1, out.M[first] - 1, 0.5 * opt.rel_tol * lo);
    MLambda m = m_lambda(assemble_form(t, root));
    out.status = ScanStatus::Found;
    out.eigenvalue = root;
    out.M_at_eigenvalue = m.M;
    out.mode_profile = m.G;
    return out;
}

std::vector<std::pair<double, double>> divergence_probe(const MathurTables& t, const std::vector<double>& eps)
{
    std::vector<std::pair<double, double>> out(eps.size());
    for(double e : eps)
        if(!(e > 0 && e < 1)) throw ParameterError("divergence_probe: offsets in (0, 1)");
    parallel_for(eps.size(), [&](std::size_t i) {
        double lam = t.gap_top * (1 - eps[i]);
        out[i] = {lam, m_lambda(assemble_form(t, lam)).M};
    });
    return out;
}

namespace {

/// x = t^3 (10 - 15 t + 6 t^2) on (0, 1): nodes and weights clustered at both ends
QuadRule smoothstep_rule(int n)
{
    const QuadRule& gl = gauss_legendre(n);
    QuadRule r{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    for(int i = 0; i < n; ++i) {
        double t = 0.5 * (1 + gl.x[i]);
        r.x[i] = t * t * t * (10 - 15 * t + 6 * t * t);
        r.w[i] = 0.5 * gl.w[i] * 30 * t * t * (1 - t) * (1 - t);
    }
    return r;
}

/// sum_k sin(m pi k a) sin(m pi k b) / (c k^2 / T^2 - lambda)
double harmonic_sum(double a, double b, double m, double c, double T, double lambda, int K)
{
    double pa = m * M_PI * a, pb = m * M_PI * b;
    double ca = 2 * std::cos(pa), cb = 2 * std::cos(pb);
    double sa0 = 0, sa = std::sin(pa), sb0 = 0, sb = std::sin(pb), sum = 0;
    for(int k = 1; k <= K; ++k) {
        sum += sa * sb / (c * k * k / (T * T) - lambda);
        double na = ca * sa - sa0, nb = cb * sb - sb0;
        sa0 = sa;
        sa = na;
        sb0 = sb;
        sb = nb;
    }
    return sum;
}

}  // namespace

double kernel_radial(const RadialSteadyState& s, double lambda, double r, double sigma, int K, int nodes,
                     const QuadControl& q)
{
    if(s.ansatz().kind != RadialKind::Polytrope && s.ansatz().kind != RadialKind::King)
        throw ParameterError("kernel_radial: needs a polytrope or King state");
    if(!(r > 0) || !(sigma > 0)) throw DomainError("kernel_radial: radii must be positive");
    const double E0 = s.E0(), L0 = s.ansatz().kind == RadialKind::Polytrope ? s.L0() : 0.0;
    // (E, L) with both r and sigma inside [r_-, r_+]: L < 2 rho^2 (E0 - U0(rho)) for rho = r, sigma
    double L_top = std::min(2 * r * r * (E0 - s.U(r)), 2 * sigma * sigma * (E0 - s.U(sigma)));
    if(!(L_top > L0)) return 0;
    const QuadRule rule = smoothstep_rule(nodes);
    std::vector<double> row(nodes, 0.0);
    parallel_for(nodes, [&](std::size_t j) {
        double L = L0 + (L_top - L0) * rule.x[j];
        double E_lo = std::max(effective_potential(s, r, L), effective_potential(s, sigma, L));
        if(!(E0 > E_lo)) return;
        double acc = 0;
        for(int i = 0; i < nodes; ++i) {
            double E = E_lo + (E0 - E_lo) * rule.x[i];
            double phi = s.phi_prime(E, L);
            if(phi == 0) continue;
            try {
                RadialOrbit o(s, E, L, q);
                const auto& info = o.info();
                double ta = o.theta(std::clamp(r, info.r_minus, info.r_plus));
                double tb = o.theta(std::clamp(sigma, info.r_minus, info.r_plus));
                acc += rule.w[i] * (E0 - E_lo) * phi / o.T()
                    * harmonic_sum(ta, tb, 2, 4 * M_PI * M_PI, o.T(), lambda, K);
            } catch(const NoOrbitError&) {
            }
        }
        row[j] = rule.w[j] * (L_top - L0) * acc;
    });
    double sum = 0;
    for(double v : row) sum += v;
    return 32 * M_PI * M_PI * sum / (r * r);
}

namespace {

/// int over Ebar in (U0(x_lo), E0bar) of f(Ebar, orbit) with t^2 grading at the bottom and
/// t^3 grading at the top, split at the midpoint
template <class F>
void energy_quadrature(const PlanarSteadyState& s, double x_far, int n, const QuadControl& q, F&& f)
{
    const double lo = s.U(x_far), hi = s.E0bar(), mid = 0.5 * (lo + hi);
    const QuadRule& gl = gauss_legendre(std::max(1, n / 2));
    for(Eigen::Index i = 0; i < gl.x.size(); ++i) {
        double t = 0.5 * (1 + gl.x[i]);
        double E = lo + (mid - lo) * t * t, w = 0.5 * gl.w[i] * (mid - lo) * 2 * t;
        PlanarOrbit o(s, E, q);
        f(o, w);
    }
    for(Eigen::Index i = 0; i < gl.x.size(); ++i) {
        double t = 0.5 * (1 + gl.x[i]);
        double E = hi - (hi - mid) * t * t * t, w = 0.5 * gl.w[i] * (hi - mid) * 3 * t * t;
        PlanarOrbit o(s, E, q);
        f(o, w);
    }
}

}  // namespace

double kernel_planar(const PlanarSteadyState& s, double lambda, double x, double y, int K, int nodes,
                     const QuadControl& q)
{
    const double ax = std::fabs(x), ay = std::fabs(y), far = std::max(ax, ay);
    if(!(far < s.R0())) return 0;
    double sum = 0;
    energy_quadrature(s, far, nodes, q, [&](const PlanarOrbit& o, double w) {
        double xp = o.x_plus();
        double tx = o.theta(std::clamp(x, -xp, xp)), ty = o.theta(std::clamp(y, -xp, xp));
        sum += w * s.alpha_prime(o.Ebar()) / o.T()
            * harmonic_sum(tx, ty, 4, 16 * M_PI * M_PI, o.T(), lambda, K);
    });
    return 32 * M_PI * sum;
}

double nystrom_planar(const PlanarSteadyState& s, double lambda, int K, int panels, int per_panel,
                      int energy_nodes, const QuadControl& q)
{
    if(panels < 1 || per_panel < 1 || energy_nodes < 2 || K < 1)
        throw ParameterError("nystrom_planar: invalid discretization");
    const int n = panels * per_panel;
    const QuadRule& gl = gauss_legendre(per_panel);
    Eigen::VectorXd x(n), w(n);
    const double h = s.R0() / panels;
    for(int p = 0; p < panels; ++p)
        for(int i = 0; i < per_panel; ++i) {
            x[p * per_panel + i] = h * (p + 0.5 * (1 + gl.x[i]));
            w[p * per_panel + i] = 0.5 * h * gl.w[i];
        }
    // the Ebar range of K(x_i, x_j) starts at U0(x_max(i, j)); row m collects all pairs with max m
    Eigen::MatrixXd Kb = Eigen::MatrixXd::Zero(n, n);
    parallel_for(n, [&](std::size_t m) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(m + 1);
        energy_quadrature(s, x[m], energy_nodes, q, [&](const PlanarOrbit& o, double wE) {
            double xp = o.x_plus(), T = o.T();
            double pre = wE * s.alpha_prime(o.Ebar()) / T;
            double tm = o.theta(std::min(x[m], xp));
            for(std::size_t i = 0; i <= m; ++i)
                row[i] += pre * harmonic_sum(tm, o.theta(std::min(x[i], xp)), 4, 16 * M_PI * M_PI, T, lambda, K);
        });
        for(std::size_t i = 0; i <= m; ++i) Kb(m, i) = 32 * M_PI * row[i];
    });
    symmetrize(Kb);
    // odd extension doubles the half-line kernel
    Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::MatrixXd B = 2 * sw.asDiagonal() * Kb * sw.asDiagonal();
    symmetrize(B);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if(es.info() != Eigen::Success) throw SolverError("nystrom_planar: eigensolver failed");
    return es.eigenvalues()[n - 1];
}

}  // namespace vpgap
