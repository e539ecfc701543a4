#pragma once

// Dormand-Prince 5(4) with Hairer's continuous extension.
//
// The stepper is driven one accepted step at a time so callers can run event
// detection and guard rails between steps. Every accepted step is recorded in
// a DenseOutput, which evaluates the C1 quartic interpolant anywhere on the
// integrated interval.

#include "divopt/real.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace divopt {

template <class Real, std::size_t N>
using OdeState = std::array<Real, N>;

/// One accepted step and its interpolation coefficients.
template <class Real, std::size_t N>
struct DenseStep {
    Real t0{};
    Real h{};
    std::array<OdeState<Real, N>, 5> rcont{};

    [[nodiscard]] OdeState<Real, N> eval(const Real& t) const {
        const Real theta = (t - t0) / h;
        const Real theta1 = Real(1) - theta;
        OdeState<Real, N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = rcont[0][i] +
                   theta * (rcont[1][i] +
                            theta1 * (rcont[2][i] + theta * (rcont[3][i] + theta1 * rcont[4][i])));
        }
        return y;
    }
};

template <class Real, std::size_t N>
class DenseOutput {
public:
    void push(DenseStep<Real, N> step) { steps_.push_back(std::move(step)); }

    [[nodiscard]] bool empty() const noexcept { return steps_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return steps_.size(); }
    [[nodiscard]] const std::vector<DenseStep<Real, N>>& steps() const noexcept { return steps_; }
    [[nodiscard]] Real t_begin() const { return steps_.front().t0; }
    [[nodiscard]] Real t_end() const { return steps_.back().t0 + steps_.back().h; }

    /// Shortens the final step so the output ends at `t`; the interpolant
    /// itself is unchanged.
    void truncate_last(const Real& t) { end_override_ = t; has_end_override_ = true; }
    [[nodiscard]] Real domain_end() const { return has_end_override_ ? end_override_ : t_end(); }

    [[nodiscard]] OdeState<Real, N> operator()(const Real& t) const {
        return locate(t).eval(t);
    }

    [[nodiscard]] const DenseStep<Real, N>& locate(const Real& t) const {
        // first step whose start exceeds t, then step back one
        auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                                   [](const Real& v, const DenseStep<Real, N>& s) { return v < s.t0; });
        if (it == steps_.begin()) return steps_.front();
        return *(it - 1);
    }

private:
    std::vector<DenseStep<Real, N>> steps_;
    Real end_override_{};
    bool has_end_override_ = false;
};

struct StepperStatus {
    bool accepted = false;
    bool underflow = false;
};

template <class Real, std::size_t N, class Rhs>
class Dopri5 {
public:
    using State = OdeState<Real, N>;

    struct Options {
        Real rtol = Real(1e-10);
        Real atol = Real(1e-12);
        Real h_init = Real(1e-6);
        Real h_max = Real(1e300);
        /// Steps below h_min_rel * max(1, |t|) count as underflow.
        Real h_min_rel = Real(64) * machine_eps<Real>();
    };

    Dopri5(Rhs rhs, Real t0, State y0, Options opt)
        : rhs_(std::move(rhs)), opt_(opt), t_(t0), y_(y0), h_(opt.h_init) {
        k1_ = rhs_(t_, y_);
    }

    [[nodiscard]] const Real& t() const noexcept { return t_; }
    [[nodiscard]] const State& y() const noexcept { return y_; }
    [[nodiscard]] const State& dydt() const noexcept { return k1_; }
    [[nodiscard]] const Real& next_step() const noexcept { return h_; }
    [[nodiscard]] std::size_t rejected() const noexcept { return rejected_; }

    /// Attempts steps until one is accepted, never stepping beyond t_limit.
    /// Returns the accepted step's dense record.
    StepperStatus step(const Real& t_limit, DenseStep<Real, N>& out) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;
        const Coeffs& c = coeffs();
        for (;;) {
            Real h = min(h_, opt_.h_max);
            if (t_ + h > t_limit) h = t_limit - t_;
            const Real h_floor = opt_.h_min_rel * max(Real(1), abs(t_));
            if (!(h > h_floor)) {
                return {false, true};
            }

            State tmp{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y1{};
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * c.a21 * k1_[i];
            k2 = rhs_(t_ + c.c2 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (c.a31 * k1_[i] + c.a32 * k2[i]);
            k3 = rhs_(t_ + c.c3 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (c.a41 * k1_[i] + c.a42 * k2[i] + c.a43 * k3[i]);
            k4 = rhs_(t_ + c.c4 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (c.a51 * k1_[i] + c.a52 * k2[i] + c.a53 * k3[i] + c.a54 * k4[i]);
            k5 = rhs_(t_ + c.c5 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (c.a61 * k1_[i] + c.a62 * k2[i] + c.a63 * k3[i] +
                                      c.a64 * k4[i] + c.a65 * k5[i]);
            k6 = rhs_(t_ + h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y_[i] + h * (c.a71 * k1_[i] + c.a73 * k3[i] + c.a74 * k4[i] +
                                     c.a75 * k5[i] + c.a76 * k6[i]);
            k7 = rhs_(t_ + h, y1);

            Real err2 = 0;
            bool finite = true;
            for (std::size_t i = 0; i < N; ++i) {
                const Real e = h * (c.e1 * k1_[i] + c.e3 * k3[i] + c.e4 * k4[i] + c.e5 * k5[i] +
                                    c.e6 * k6[i] + c.e7 * k7[i]);
                const Real sk = opt_.atol + opt_.rtol * max(abs(y_[i]), abs(y1[i]));
                const Real ratio = e / sk;
                err2 += ratio * ratio;
                finite = finite && is_finite(y1[i]) && is_finite(k7[i]);
            }
            const Real err = sqrt(err2 / Real(N));

            if (!finite || !is_finite(err)) {
                h_ = h * Real(0.25);
                ++rejected_;
                continue;
            }

            // safety 0.9, growth limited to [0.2, 5]
            Real fac = err > Real(0) ? Real(0.9) * pow(err, Real(-0.2)) : Real(5);
            fac = min(Real(5), max(Real(0.2), fac));

            if (err > Real(1)) {
                h_ = h * min(Real(1), fac);
                ++rejected_;
                continue;
            }

            out.t0 = t_;
            out.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const Real ydiff = y1[i] - y_[i];
                const Real bspl = h * k1_[i] - ydiff;
                out.rcont[0][i] = y_[i];
                out.rcont[1][i] = ydiff;
                out.rcont[2][i] = bspl;
                out.rcont[3][i] = ydiff - h * k7[i] - bspl;
                out.rcont[4][i] = h * (c.d1 * k1_[i] + c.d3 * k3[i] + c.d4 * k4[i] +
                                       c.d5 * k5[i] + c.d6 * k6[i] + c.d7 * k7[i]);
            }
            t_ += h;
            y_ = y1;
            k1_ = k7;
            h_ = h * fac;
            return {true, false};
        }
    }

private:
    struct Coeffs {
        Real c2, c3, c4, c5;
        Real a21, a31, a32, a41, a42, a43, a51, a52, a53, a54;
        Real a61, a62, a63, a64, a65, a71, a73, a74, a75, a76;
        Real e1, e3, e4, e5, e6, e7;
        Real d1, d3, d4, d5, d6, d7;
    };

    static Real frac(long long num, long long den) { return Real(num) / Real(den); }

    static const Coeffs& coeffs() {
        static const Coeffs c = [] {
            Coeffs k{};
            k.c2 = frac(1, 5);
            k.c3 = frac(3, 10);
            k.c4 = frac(4, 5);
            k.c5 = frac(8, 9);
            k.a21 = frac(1, 5);
            k.a31 = frac(3, 40);
            k.a32 = frac(9, 40);
            k.a41 = frac(44, 45);
            k.a42 = frac(-56, 15);
            k.a43 = frac(32, 9);
            k.a51 = frac(19372, 6561);
            k.a52 = frac(-25360, 2187);
            k.a53 = frac(64448, 6561);
            k.a54 = frac(-212, 729);
            k.a61 = frac(9017, 3168);
            k.a62 = frac(-355, 33);
            k.a63 = frac(46732, 5247);
            k.a64 = frac(49, 176);
            k.a65 = frac(-5103, 18656);
            k.a71 = frac(35, 384);
            k.a73 = frac(500, 1113);
            k.a74 = frac(125, 192);
            k.a75 = frac(-2187, 6784);
            k.a76 = frac(11, 84);
            k.e1 = frac(71, 57600);
            k.e3 = frac(-71, 16695);
            k.e4 = frac(71, 1920);
            k.e5 = frac(-17253, 339200);
            k.e6 = frac(22, 525);
            k.e7 = frac(-1, 40);
            k.d1 = frac(-12715105075LL, 11282082432LL);
            k.d3 = frac(87487479700LL, 32700410799LL);
            k.d4 = frac(-10690763975LL, 1880347072LL);
            k.d5 = frac(701980252875LL, 199316789632LL);
            k.d6 = frac(-1453857185LL, 822651844LL);
            k.d7 = frac(69997945LL, 29380423LL);
            return k;
        }();
        return c;
    }

    Rhs rhs_;
    Options opt_;
    Real t_;
    State y_;
    State k1_{};
    Real h_;
    std::size_t rejected_ = 0;
};

}  // namespace divopt
