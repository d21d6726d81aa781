#include "vpgap/numerics.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace vpgap {

namespace {

std::atomic<int> g_threads{0};

QuadRule compute_gauss_legendre(int n)
{
    QuadRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    for(int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5)), dp = 0;
        for(int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = x;
            for(int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if(std::fabs(dx) < 1e-16) break;
        }
        double w = 2 / ((1 - x * x) * dp * dp);
        rule.x[i] = -x;
        rule.w[i] = w;
        rule.x[n - 1 - i] = x;
        rule.w[n - 1 - i] = w;
    }
    if(n % 2 == 1) rule.x[n / 2] = 0;
    return rule;
}

/// T_m(t_j) for the first-kind points, row m, column j
const Eigen::MatrixXd& chebyshev_matrix(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& entry = cache[n];
    if(!entry) {
        entry = std::make_unique<Eigen::MatrixXd>(n, n);
        for(int j = 0; j < n; ++j) {
            double angle = M_PI - M_PI * (j + 0.5) / n;
            for(int m = 0; m < n; ++m)
                (*entry)(m, j) = std::cos(m * angle);
        }
    }
    return *entry;
}

}  // namespace

const QuadRule& gauss_legendre(int n)
{
    if(n < 1) throw ParameterError("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& entry = cache[n];
    if(!entry) entry = std::make_unique<QuadRule>(compute_gauss_legendre(n));
    return *entry;
}

QuadRule graded_rule(int panels, double grading, int per_panel, int geometric_levels, double ratio)
{
    if(panels < 1 || per_panel < 1 || grading < 1 || geometric_levels < 0 || !(ratio > 0 && ratio < 1))
        throw ParameterError("graded_rule: invalid parameters");
    std::vector<double> edges{0};
    for(int m = geometric_levels; m >= 1; --m)
        edges.push_back(std::pow(ratio, m) / panels);
    for(int i = 1; i <= panels; ++i)
        edges.push_back(double(i) / panels);
    const QuadRule& gl = gauss_legendre(per_panel);
    std::size_t n = (edges.size() - 1) * per_panel;
    QuadRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    std::size_t idx = 0;
    for(std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double a = edges[p], b = edges[p + 1];
        for(int q = 0; q < per_panel; ++q, ++idx) {
            double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[q];
            rule.x[idx] = std::pow(t, grading);
            rule.w[idx] = 0.5 * (b - a) * gl.w[q] * grading * std::pow(t, grading - 1);
        }
    }
    return rule;
}

double local_derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& f, int c,
                        int first, int last)
{
    int lo = std::clamp(c - 2, first, std::max(first, last - 4)), hi = std::min(last + 1, lo + 5);
    // Lagrange basis derivatives at x[c]
    double d = 0;
    for(int i = lo; i < hi; ++i) {
        double sum = 0;
        for(int j = lo; j < hi; ++j) {
            if(j == i) continue;
            double prod = 1 / (x[i] - x[j]);
            for(int q = lo; q < hi; ++q)
                if(q != i && q != j) prod *= (x[c] - x[q]) / (x[i] - x[q]);
            sum += prod;
        }
        d += sum * f[i];
    }
    return d;
}

Eigen::ArrayXd chebyshev_points(int n)
{
    Eigen::ArrayXd s(n);
    for(int j = 0; j < n; ++j)
        s[j] = 0.5 * (1 - std::cos(M_PI * (j + 0.5) / n));
    return s;
}

Eigen::VectorXd chebyshev_coefficients(const Eigen::VectorXd& samples)
{
    int n = samples.size();
    Eigen::VectorXd c = (2.0 / n) * (chebyshev_matrix(n) * samples);
    c[0] *= 0.5;
    return c;
}

Eigen::VectorXd chebyshev_antiderivative(const Eigen::VectorXd& c)
{
    int n = c.size();
    auto coef = [&](int m) { return m < n ? c[m] : 0.0; };
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n + 1);
    // ds = dt / 2
    F[1] = 0.5 * (coef(0) - 0.5 * coef(2));
    for(int m = 2; m <= n; ++m)
        F[m] = 0.5 * (coef(m - 1) - coef(m + 1)) / (2.0 * m);
    double at_minus_one = 0;
    for(int m = 1; m <= n; ++m)
        at_minus_one += (m % 2 ? -F[m] : F[m]);
    F[0] = -at_minus_one;
    return F;
}

double chebyshev_eval(const Eigen::VectorXd& c, double s)
{
    double t = 2 * s - 1, b1 = 0, b2 = 0;
    for(int m = c.size() - 1; m >= 1; --m) {
        double b0 = 2 * t * b1 - b2 + c[m];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

double chebyshev_integral(const Eigen::VectorXd& c)
{
    double sum = 0;
    for(int m = 0; m < c.size(); m += 2)
        sum += c[m] * 2.0 / (1.0 - double(m) * m);
    return 0.5 * sum;
}

ChebyshevIntegral chebyshev_integrate(const std::function<double(double)>& h, const QuadControl& q)
{
    if(q.n_min < 4 || q.n_max < q.n_min || !(q.tol > 0))
        throw ParameterError("chebyshev_integrate: invalid quadrature control");
    ChebyshevIntegral out;
    double prev = NAN;
    for(int n = q.n_min; n <= q.n_max; n *= 2) {
        Eigen::ArrayXd s = chebyshev_points(n);
        Eigen::VectorXd f(n);
        for(int j = 0; j < n; ++j) {
            f[j] = h(s[j]);
            if(!std::isfinite(f[j]))
                throw SolverError("chebyshev_integrate: non-finite integrand sample");
        }
        Eigen::VectorXd c = chebyshev_coefficients(f);
        out.F = chebyshev_antiderivative(c);
        out.total = chebyshev_eval(out.F, 1);
        out.samples = n;
        double tail = 2 * c.tail(n / 4).cwiseAbs().maxCoeff();
        out.error = std::isnan(prev) ? HUGE_VAL : std::max(std::fabs(out.total - prev), tail);
        if(out.error <= q.tol * std::fabs(out.total))
            return out;
        prev = out.total;
    }
    throw AccuracyError("chebyshev_integrate: no convergence within the sample limit", out.total,
                        out.error);
}

void set_thread_count(int n)
{
    if(n < 0) throw ParameterError("thread count must be nonnegative");
    g_threads = n;
}

int thread_count()
{
    int n = g_threads;
    if(n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

}  // namespace vpgap
