#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "vpgap/errors.hpp"
#include "vpgap/mathur.hpp"

using namespace vpgap;

namespace {

const PlanarSteadyState& planar_king()
{
    static const PlanarSteadyState s = [] {
        PlanarAnsatz a;
        a.kind = PlanarKind::King;
        a.kappa = 1;
        return solve_planar(a);
    }();
    return s;
}

const MathurTables& king_tables()
{
    static const MathurTables t = mathur_tables_planar(planar_king());
    return t;
}

const RadialSteadyState& shell()
{
    static const RadialSteadyState s = [] {
        RadialAnsatz a;
        a.k = 0.5;
        a.l = -0.5;
        a.L0 = 0.1;
        a.kappa = 1;
        return solve_radial(a);
    }();
    return s;
}

/// coarse radial discretization for the unit tests
Discretization coarse_radial()
{
    Discretization d;
    d.n_E = 8;
    d.n_L = 6;
    d.levels = 8;
    return d;
}

const MathurTables& shell_tables()
{
    static const MathurTables t = mathur_tables_radial(shell(), period_surface(shell(), 20, 20).T_sup,
                                                       coarse_radial());
    return t;
}

double min_eigenvalue_in_metric(const MathurForm& f)
{
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(f.A, Eigen::MatrixXd(f.W.asDiagonal()));
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("discretization validation")
{
    Discretization d;
    CHECK_NOTHROW(validate(d));
    d.n_r = 15;
    CHECK_THROWS_AS(validate(d), ParameterError);
    d = {};
    d.K_max = 3;
    CHECK_THROWS_AS(validate(d), ParameterError);
    d = {};
    d.grading = 0.5;
    CHECK_THROWS_AS(validate(d), ParameterError);
}

TEST_CASE("m_lambda hand cases")
{
    Eigen::VectorXd W(3);
    W << 0.5, 2, 3;
    MathurForm f;
    f.W = W;
    f.A = Eigen::MatrixXd::Zero(3, 3);
    CHECK(m_lambda(f).M == 0);

    f.A = W.asDiagonal();
    MLambda m = m_lambda(f);
    CHECK(m.M == doctest::Approx(1).epsilon(1e-14));
    CHECK(m.G.dot(W.asDiagonal() * m.G) == doctest::Approx(1).epsilon(1e-13));

    Eigen::Vector3d d(2, 1, 0);
    f.A = (d.array() * W.array()).matrix().asDiagonal();
    m = m_lambda(f);
    CHECK(m.M == doctest::Approx(2).epsilon(1e-14));
    CHECK(m.G[0] == doctest::Approx(1 / std::sqrt(W[0])).epsilon(1e-13));
    CHECK(std::fabs(m.G[1]) < 1e-13);

    f.W[2] = 0;
    CHECK_THROWS_AS(m_lambda(f), DiscretizationError);
}

TEST_CASE("m_lambda matches a generalized eigensolver on random forms")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.1, 1);
    for(int trial = 0; trial < 20; ++trial) {
        int n = 5 + trial;
        Eigen::MatrixXd Z(n, n + 3);
        for(Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = U(rng) - 0.5;
        MathurForm f;
        f.A = Z * Z.transpose();
        f.W.resize(n);
        for(int i = 0; i < n; ++i) f.W[i] = U(rng);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(f.A, Eigen::MatrixXd(f.W.asDiagonal()));
        MLambda m = m_lambda(f);
        CHECK(m.M == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-12));
        Eigen::VectorXd r = f.A * m.G - m.M * (f.W.asDiagonal() * m.G);
        CHECK(r.norm() < 1e-11 * m.M);
        CHECK(form_value(f, m.G) == doctest::Approx(m.M).epsilon(1e-12));
    }
}

TEST_CASE("empty quadrature gives the zero form")
{
    MathurTables t;
    t.frequency = 16 * M_PI * M_PI;
    t.T_ref = 2 * M_PI;
    t.gap_top = 4;
    t.W = Eigen::VectorXd::Constant(16, 1.0 / 16);
    MathurForm f = assemble_form(t, 2);
    CHECK(f.A.isZero(0));
    CHECK(m_lambda(f).M == 0);
}

TEST_CASE("planar form structure")
{
    const MathurTables& t = king_tables();
    CHECK(t.planar);
    CHECK(t.skipped_nodes == 0);
    CHECK(t.tail_estimate <= t.disc.k_tol);
    CHECK(t.gap_top == doctest::Approx(16 * M_PI * M_PI / std::pow(period_planar(planar_king(), planar_king().E0bar()), 2)));
    CHECK(t.W.sum() == doctest::Approx(planar_king().R0()).epsilon(1e-14));
    CHECK_THROWS_AS(assemble_form(t, 0), DomainError);
    CHECK_THROWS_AS(assemble_form(t, t.gap_top), DomainError);
    CHECK_THROWS_AS(assemble_form(t, -1), DomainError);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for(double frac : {0.1, 0.5, 0.9, 0.999}) {
        MathurForm f = assemble_form(t, frac * t.gap_top);
        CHECK(symmetry_residual(f.A) < 1e-10);
        CHECK(min_eigenvalue_in_metric(f) > -1e-12 * m_lambda(f).M);
        Eigen::VectorXd G(t.W.size());
        for(int i = 0; i < G.size(); ++i) G[i] = N(rng);
        CHECK(form_value(f, G) >= 0);
        CHECK(form_value(f, Eigen::VectorXd::Zero(t.W.size())) == 0);
    }
}

TEST_CASE("planar form converges under energy refinement")
{
    const MathurTables& t = king_tables();
    Discretization fine = t.disc;
    fine.n_E *= 2;
    MathurTables tf = mathur_tables_planar(planar_king(), fine);
    double lam = 0.5 * t.gap_top;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    for(int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd G(t.W.size());
        for(int i = 0; i < G.size(); ++i) G[i] = N(rng);
        double a = form_value(assemble_form(t, lam), G), b = form_value(assemble_form(tf, lam), G);
        CHECK(std::fabs(a - b) < 1e-4 * std::fabs(b));
    }
}

TEST_CASE("planar form agrees with the direct kernel")
{
    // A_ij = 2 int_i int_j Kbar, so A_ij / (dx_i dx_j) approaches 2 Kbar at the cell midpoints
    const MathurTables& t = king_tables();
    double lam = 0.5 * t.gap_top;
    MathurForm f = assemble_form(t, lam);
    for(auto [i, j] : {std::pair{5, 20}, std::pair{30, 12}, std::pair{40, 41}}) {
        double x = 0.5 * (t.edges[i] + t.edges[i + 1]), y = 0.5 * (t.edges[j] + t.edges[j + 1]);
        double k = kernel_planar(planar_king(), lam, x, y, 256);
        CHECK(kernel_planar(planar_king(), lam, y, x, 256) == doctest::Approx(k).epsilon(1e-12));
        CHECK(kernel_planar(planar_king(), lam, -x, y, 256) == doctest::Approx(-k).epsilon(1e-9));
        CHECK(f.A(i, j) / (t.W[i] * t.W[j]) == doctest::Approx(2 * k).epsilon(3e-3));
    }
}

TEST_CASE("planar Nystrom and sum-of-squares routes agree")
{
    Discretization d;
    d.n_r = 96;
    MathurTables t = mathur_tables_planar(planar_king(), d);
    double lam = 0.5 * t.gap_top;
    double sos = m_lambda(assemble_form(t, lam)).M;
    double nys = nystrom_planar(planar_king(), lam, 256, 16, 6, 48);
    CHECK(std::fabs(sos - nys) < 1e-3 * sos);
}

TEST_CASE("planar King scan finds an eigenvalue")
{
    const MathurTables& t = king_tables();
    MathurScan s = scan(t);
    REQUIRE(s.status == ScanStatus::Found);
    REQUIRE(s.eigenvalue.has_value());
    CHECK(*s.eigenvalue > 0);
    CHECK(*s.eigenvalue < t.gap_top);
    CHECK(std::fabs(s.M_at_eigenvalue - 1) < 1e-4);
    CHECK(s.mode_profile.dot(t.W.asDiagonal() * s.mode_profile) == doctest::Approx(1).epsilon(1e-12));
    for(Eigen::Index i = 0; i < s.M.size(); ++i) {
        CHECK(s.M[i] >= 0);
        CHECK(s.converged[i]);
        if(i > 0) CHECK(s.M[i] >= s.M[i - 1]);
        CHECK(s.lambda[i] > 0);
        CHECK(s.lambda[i] < t.gap_top);
    }
    auto probe = divergence_probe(t, {1e-1, 1e-2, 1e-3});
    CHECK(probe[1].second > probe[0].second);
    CHECK(probe[2].second > probe[1].second);
}

TEST_CASE("planar polytrope k = 0.75 scan finds an eigenvalue")
{
    PlanarAnsatz a;
    a.k = 0.75;
    a.kappa = 1;
    MathurScan s = scan(mathur_tables_planar(solve_planar(a)));
    CHECK(s.status == ScanStatus::Found);
}

TEST_CASE("scan status without a crossing")
{
    MathurTables t = king_tables();
    auto shrink = [&t](double factor) {
        for(auto& nd : t.nodes) nd.weight *= factor;
        for(auto& B : t.B) B *= factor;
        t.tail *= factor;
    };
    double M_top = m_lambda(assemble_form(t, t.gap_top * (1 - 1e-4))).M;
    shrink(0.995 / M_top);
    MathurScan near = scan(t);
    CHECK(near.status == ScanStatus::Inconclusive);
    CHECK(!near.eigenvalue);
    CHECK(near.max_M == doctest::Approx(0.995).epsilon(1e-9));
    shrink(0.5);
    MathurScan none = scan(t);
    CHECK(none.status == ScanStatus::None);
    CHECK(!none.eigenvalue);
}

TEST_CASE("assembly is independent of the thread count")
{
    Discretization d;
    d.n_E = 4;
    set_thread_count(1);
    MathurTables a = mathur_tables_planar(planar_king(), d);
    set_thread_count(3);
    MathurTables b = mathur_tables_planar(planar_king(), d);
    set_thread_count(0);
    double lam = 0.7 * a.gap_top;
    CHECK((assemble_form(a, lam).A.array() == assemble_form(b, lam).A.array()).all());
}

TEST_CASE("radial kernel symmetry and agreement with the assembled form")
{
    const MathurTables& t = shell_tables();
    CHECK(!t.planar);
    double r_in = shell().inner_radius(), R0 = shell().R0();
    CHECK(t.W.sum() == doctest::Approx((R0 * R0 * R0 - r_in * r_in * r_in) / 3).epsilon(1e-13));
    double lam = 0.5 * t.gap_top;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(r_in, R0);
    for(int i = 0; i < 10; ++i) {
        double r = U(rng), sg = U(rng);
        double a = r * r * kernel_radial(shell(), lam, r, sg, t.K, 32);
        double b = sg * sg * kernel_radial(shell(), lam, sg, r, t.K, 32);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
    // A_ij = int_i int_j r^2 K(r, sigma)
    MathurForm f = assemble_form(t, lam);
    CHECK(symmetry_residual(f.A) < 1e-10);
    for(auto [i, j] : {std::pair{10, 20}, std::pair{5, 40}, std::pair{30, 33}}) {
        double r = 0.5 * (t.edges[i] + t.edges[i + 1]), sg = 0.5 * (t.edges[j] + t.edges[j + 1]);
        double dr = t.edges[i + 1] - t.edges[i], ds = t.edges[j + 1] - t.edges[j];
        double k = r * r * kernel_radial(shell(), lam, r, sg, t.K, 32);
        CHECK(f.A(i, j) / (dr * ds) == doctest::Approx(k).epsilon(2e-3));
    }
}

TEST_CASE("radial shell scan finds an eigenvalue above the particle periods")
{
    const MathurTables& t = shell_tables();
    MathurScan s = scan(t);
    REQUIRE(s.status == ScanStatus::Found);
    for(Eigen::Index i = 1; i < s.M.size(); ++i) CHECK(s.M[i] >= s.M[i - 1]);
    double P = 2 * M_PI / std::sqrt(*s.eigenvalue);
    CHECK(P > t.T_ref);
    auto probe = divergence_probe(t, {1e-1, 1e-2, 1e-3});
    CHECK(probe[1].second > probe[0].second);
    CHECK(probe[2].second > probe[1].second);
}
