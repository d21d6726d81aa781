#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

#include "vpgap/errors.hpp"

namespace vpgap {

/// Dormand-Prince 5(4) pair with the 4th-order continuous extension
template <int N>
class DormandPrince {
public:
    using State = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<State(double, const State&)>;

    DormandPrince(Rhs rhs, double rtol, double atol)
        : f_(std::move(rhs)), rtol_(rtol), atol_(atol)
    {
        if(!(rtol > 0) || !(atol > 0))
            throw ParameterError("DormandPrince: tolerances must be positive");
    }

    void start(double t0, const State& y0, double h0)
    {
        t_ = t_old_ = t0;
        y_ = y_old_ = y0;
        k1_ = f_(t0, y0);
        h_ = h0;
    }

    /// one accepted step, at most up to t_stop
    void step(double t_stop = HUGE_VAL)
    {
        static const double
            c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9,
            a21 = 1. / 5,
            a31 = 3. / 40, a32 = 9. / 40,
            a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9,
            a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729,
            a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
            a65 = -5103. / 18656,
            a71 = 35. / 384, a73 = 500. / 1113, a74 = 125. / 192, a75 = -2187. / 6784,
            a76 = 11. / 84,
            e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
            e6 = 22. / 525, e7 = -1. / 40,
            d1 = -12715105075. / 11282082432, d3 = 87487479700. / 32700410799,
            d4 = -10690763975. / 1880347072, d5 = 701980252875. / 199316789632,
            d6 = -1453857185. / 822651844, d7 = 69997945. / 29380423;
        for(int attempt = 0; attempt < 1000; ++attempt) {
            double h = std::min(h_, t_stop - t_);
            if(!(h > 0))
                throw SolverError("DormandPrince: step size underflow");
            State k2 = f_(t_ + c2 * h, y_ + h * a21 * k1_);
            State k3 = f_(t_ + c3 * h, y_ + h * (a31 * k1_ + a32 * k2));
            State k4 = f_(t_ + c4 * h, y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
            State k5 = f_(t_ + c5 * h, y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
            State k6 = f_(t_ + h, y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            State y_new = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            State k7 = f_(t_ + h, y_new);
            State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double norm = 0;
            for(int i = 0; i < y_.size(); ++i) {
                double sc = atol_ + rtol_ * std::max(std::fabs(y_[i]), std::fabs(y_new[i]));
                norm += (err[i] / sc) * (err[i] / sc);
            }
            norm = std::sqrt(norm / y_.size());
            if(!std::isfinite(norm)) {
                h_ = 0.25 * h;
                continue;
            }
            double fac = norm > 0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            if(norm <= 1) {
                ydiff_ = y_new - y_;
                bspl_ = h * k1_ - ydiff_;
                r4_ = ydiff_ - h * k7 - bspl_;
                r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                t_old_ = t_;
                y_old_ = y_;
                t_ += h;
                y_ = y_new;
                k1_ = k7;
                h_ = h * fac;
                return;
            }
            h_ = h * std::min(1.0, fac);
        }
        throw SolverError("DormandPrince: too many rejected steps");
    }

    /// continuous extension on the last accepted step [t_old, t]
    State dense(double t) const
    {
        double h = t_ - t_old_;
        if(h == 0) return y_;
        double th = (t - t_old_) / h, th1 = 1 - th;
        return y_old_ + th * (ydiff_ + th1 * (bspl_ + th * (r4_ + th1 * r5_)));
    }

    double t() const { return t_; }
    double t_old() const { return t_old_; }
    const State& y() const { return y_; }
    const State& y_old() const { return y_old_; }
    const State& dydt() const { return k1_; }

private:
    Rhs f_;
    double rtol_, atol_;
    double t_ = 0, t_old_ = 0, h_ = 0;
    State y_, y_old_, k1_, ydiff_, bspl_, r4_, r5_;
};

}  // namespace vpgap
