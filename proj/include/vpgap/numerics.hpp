#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "vpgap/errors.hpp"

namespace vpgap {

/// nodes and weights of a quadrature rule
struct QuadRule {
    Eigen::ArrayXd x;
    Eigen::ArrayXd w;
};

/// Gauss-Legendre rule with n nodes on [-1, 1]; cached, thread-safe
const QuadRule& gauss_legendre(int n);

/// composite Gauss-Legendre rule on (0, 1) for the variable u = t^grading,
/// uniform panels in t plus geometric_levels panels toward t = 0 shrinking by ratio
QuadRule graded_rule(int panels, double grading, int per_panel, int geometric_levels, double ratio = 0.2);

/// Chebyshev first-kind points on [0, 1], increasing
Eigen::ArrayXd chebyshev_points(int n);

/// coefficients of the interpolant through samples at chebyshev_points(n)
Eigen::VectorXd chebyshev_coefficients(const Eigen::VectorXd& samples);

/// coefficients of the antiderivative F with F(0) = 0, variable s in [0, 1]
Eigen::VectorXd chebyshev_antiderivative(const Eigen::VectorXd& c);

/// value of the series at s in [0, 1] (Clenshaw)
double chebyshev_eval(const Eigen::VectorXd& c, double s);

/// integral of the series over [0, 1]
double chebyshev_integral(const Eigen::VectorXd& c);

/// accuracy controls for turning-point integrals
struct QuadControl {
    double tol = 1e-11;  ///< relative tolerance on the full integral
    int n_min = 16;
    int n_max = 1024;
};

/// Chebyshev antiderivative I(s) = int_0^s h of a smooth integrand on [0, 1];
/// the sample count doubles until successive totals and the coefficient tail agree to tol
struct ChebyshevIntegral {
    Eigen::VectorXd F;  ///< coefficients of I
    double total = 0;   ///< I(1)
    double error = 0;   ///< estimated absolute error of total
    int samples = 0;

    double operator()(double s) const { return chebyshev_eval(F, s); }
};

ChebyshevIntegral chebyshev_integrate(const std::function<double(double)>& h, const QuadControl& q);

/// cubic Hermite interpolation on [x0, x1]; value and derivative
inline void hermite(double x0, double x1, double f0, double f1, double d0, double d1,
                    double x, double* f, double* df = nullptr)
{
    double h = x1 - x0, t = (x - x0) / h, t2 = t * t, t3 = t2 * t;
    *f = (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0
        + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
    if(df)
        *df = ((6 * t2 - 6 * t) * (f0 - f1)) / h + (3 * t2 - 4 * t + 1) * d0
            + (3 * t2 - 2 * t) * d1;
}

/// (p(xb) - p(xa)) / (xb - xa) for the cubic Hermite interpolant p on [x0, x1], free of cancellation
inline double hermite_mean_slope(double x0, double x1, double f0, double f1, double d0, double d1,
                                 double xa, double xb)
{
    double h = x1 - x0, ta = (xa - x0) / h, tb = (xb - x0) / h, D = f1 - f0;
    double c1 = h * d0, c2 = 3 * D - 2 * h * d0 - h * d1, c3 = -2 * D + h * d0 + h * d1;
    return (c1 + c2 * (ta + tb) + c3 * (ta * ta + ta * tb + tb * tb)) / h;
}

/// derivative at x[c] of the quartic through five nodes around c, all taken from [first, last]
double local_derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& f, int c,
                        int first, int last);

/// Brent's method for a bracketed root; fa, fb must differ in sign
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double xtol = 0, int max_iter = 200)
{
    if(fa == 0) return a;
    if(fb == 0) return b;
    if((fa > 0) == (fb > 0))
        throw SolverError("brent_root: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for(int iter = 0; iter < max_iter; ++iter) {
        if((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if(std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol = 2 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        double m = 0.5 * (c - b);
        if(std::fabs(m) <= tol || fb == 0)
            return b;
        if(std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q;
            if(a == c) {
                p = 2 * m * s;
                q = 1 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2 * m * qq * (qq - r) - (b - a) * (r - 1));
                q = (qq - 1) * (r - 1) * (s - 1);
            }
            if(p > 0) q = -q; else p = -p;
            if(2 * p < std::min(3 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0 ? tol : -tol);
        fb = f(b);
    }
    throw SolverError("brent_root: no convergence");
}

template <class F>
double brent_root(F&& f, double a, double b, double xtol = 0)
{
    return brent_root(f, a, b, f(a), f(b), xtol);
}

/// worker count for parallel loops; 0 selects the hardware concurrency
void set_thread_count(int n);
int thread_count();

/// runs f(i) for i in [0, n); each index must write only its own output slot
template <class F>
void parallel_for(std::size_t n, F&& f)
{
    std::size_t nt = std::min<std::size_t>(thread_count(), n);
    if(nt <= 1) {
        for(std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for(std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                f(i);
            } catch(...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if(!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for(std::size_t t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for(auto& t : pool) t.join();
    if(error) std::rethrow_exception(error);
}

}  // namespace vpgap
