#include "divopt/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace divopt {

namespace {

template <class Real>
Real quiet_nan() {
    return std::numeric_limits<Real>::quiet_NaN();
}

// Envelope expressions without the per-call domain checks of the public
// helpers; the integrator probes points outside the domain and expects NaN.
template <class Real>
struct Envelopes {
    Real beta, lambda, inv_beta, w, spread, kappa;

    explicit Envelopes(const ModelParams& p)
        : beta(p.beta()),
          lambda(p.lambda()),
          inv_beta(Real(1) / beta),
          w(beta / (beta + lambda)),
          spread(p.rho() - p.r()),
          kappa(p.kappa()) {}

    [[nodiscard]] Real ell(const Real& q) const {
        using std::log;
        return w * ((spread + kappa) * q + (lambda / beta) * log(inv_beta - q));
    }
    // m - ell, exact in q
    [[nodiscard]] Real width(const Real& q) const { return w * kappa * (inv_beta - q); }
    [[nodiscard]] Real m(const Real& q) const { return ell(q) + width(q); }
    [[nodiscard]] Real dm(const Real& q) const {
        return (beta * spread - lambda * beta / (Real(1) - beta * q)) / (beta + lambda);
    }
    [[nodiscard]] Real dell(const Real& q) const { return dm(q) + w * kappa; }

    [[nodiscard]] bool inside(const Real& q) const { return q > Real(0) && q < inv_beta; }
};

template <class Real>
Real transformed_rhs(const Envelopes<Real>& e, const Real& q, const Real& chi) {
    const Real gap = e.width(q) - chi;  // m - n
    return e.beta * e.beta * q / (Real(1) - e.beta * q) * gap / chi;
}

template <class Real>
Real positive_root(const Real& b, const Real& c) {
    // y^2 - b y - c = 0 with c > 0, evaluated without cancellation
    using std::sqrt;
    const Real disc = sqrt(b * b + Real(4) * c);
    return b >= Real(0) ? (b + disc) / Real(2) : Real(2) * c / (disc - b);
}

template <class Real, std::size_t N, class Gap>
Real bisect_crossing(const DenseStep<Real, N>& rec, const Gap& gap) {
    Real lo = rec.t0;
    Real hi = rec.t0 + rec.h;
    for (int it = 0; it < 512; ++it) {
        const Real mid = (lo + hi) / Real(2);
        if (!(mid > lo && mid < hi)) break;
        if (gap(mid) >= Real(0)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace

template <class Real>
SeriesCoefficients<Real> series_start(const ModelParams& p, double epsilon) {
    if (classify_regime(p) != Regime::General) {
        throw UnsupportedRegime("series start requires mu != rho");
    }
    if (!(epsilon > 0.0 && epsilon < 1e-3)) {
        throw DomainError("series start: epsilon must lie in (0, 1e-3)");
    }
    const Real beta = p.beta();
    const Real lambda = p.lambda();
    const Real kappa = p.kappa();
    const Real spread = p.rho() - p.r();
    SeriesCoefficients<Real> s;
    s.a00 = beta * beta * kappa / (beta + lambda);
    s.b0 = -(beta / (beta + lambda)) * (spread + kappa - lambda);
    s.alpha = positive_root(s.b0, s.a00);
    s.chi2 = -(beta * beta * beta / (beta + lambda)) / (Real(1) + s.a00 / (Real(2) * s.alpha * s.alpha));
    s.q0 = Real(epsilon) / beta;
    return s;
}

template <class Real>
Real rhs_O(Real q, Real n, const ModelParams& p) {
    const Envelopes<Real> e(p);
    if (!e.inside(q)) throw DomainError("rhs_O: q must lie in (0, 1/beta)");
    const Real chi = n - e.ell(q);
    if (chi == Real(0)) throw SingularityError("rhs_O: n equals ell(q)");
    return transformed_rhs(e, q, chi);
}

template <class Real>
void FrontierSolution<Real>::check_domain(const Real& q, const char* who) const {
    if (!(q >= Real(0)) || !(q <= qstar_)) {
        throw DomainError(std::string(who) + ": q must lie in [0, q*]");
    }
}

template <class Real>
Real FrontierSolution<Real>::n(Real q) const {
    check_domain(q, "n");
    const Envelopes<Real> e(params_);
    if (regime_ == Regime::Corner) return e.m(q);
    if (q < series_.q0) {
        return e.ell(q) + q * (series_.alpha + Real(0.5) * series_.chi2 * q);
    }
    return dense_(q)[0];
}

template <class Real>
Real FrontierSolution<Real>::dn(Real q) const {
    check_domain(q, "dn");
    const Envelopes<Real> e(params_);
    if (regime_ == Regime::Corner) return e.dm(q);
    if (q < series_.q0) return e.dell(q) + series_.alpha + series_.chi2 * q;
    const Real chi = dense_(q)[0] - e.ell(q);
    return transformed_rhs(e, q, chi);
}

template <class Real>
Real FrontierSolution<Real>::big_n(Real q) const {
    using std::log;
    const Real beta = params_.beta();
    return (n(q) - log(Real(1) / beta - q)) / beta;
}

template <class Real>
Real FrontierSolution<Real>::big_dn(Real q) const {
    const Real beta = params_.beta();
    return dn(q) / beta + Real(1) / (Real(1) - beta * q);
}

template <class Real>
Real FrontierSolution<Real>::cumulative(const Real& q) const {
    using std::log;
    if (q >= series_.q0) return dense_(q)[1];
    // n' is known in closed form below q0, so the integral is too
    const Real beta = params_.beta();
    const Real lambda = params_.lambda();
    const Real q0 = series_.q0;
    const Real below = (dn0_ / beta) * log(q0 / q) + (series_.chi2 / beta) * (q0 - q) -
                       (lambda / (beta + lambda)) * log((Real(1) - beta * q) / (Real(1) - beta * q0));
    return -below;
}

template <class Real>
Real FrontierSolution<Real>::tail_integral(Real q) const {
    check_domain(q, "tail_integral");
    if (!(q > Real(0))) throw DomainError("tail_integral: q must be positive");
    if (q == qstar_) return Real(0);
    return integral_star_ - cumulative(q);
}

template <class Real>
Real FrontierSolution<Real>::log_z(Real q) const {
    using std::log;
    const Real tail = tail_integral(q);
    if (q == qstar_) return log(zstar_);
    const Real beta = params_.beta();
    return log(beta * q) - log(Real(1) - beta * q) - tail;
}

template <class Real>
std::vector<CurvePoint> FrontierSolution<Real>::curve() const {
    const Envelopes<Real> e(params_);
    std::vector<CurvePoint> out;
    auto add = [&](const Real& q) {
        CurvePoint c;
        c.q = to_double(q);
        c.n = to_double(n(q));
        c.m = to_double(e.m(q));
        c.ell = to_double(e.ell(q));
        c.nprime = to_double(dn(q));
        out.push_back(c);
    };
    add(Real(0));
    for (const auto& st : dense_.steps()) {
        if (st.t0 < qstar_) add(st.t0);
    }
    add(qstar_);
    return out;
}

template <class Real>
FrontierSolution<Real> solve_frontier(const ModelParams& p, const SolverOptions& opt) {
    using std::abs;
    using std::log;
    const Regime regime = classify_regime(p);
    if (regime == Regime::Degenerate) {
        throw UnsupportedRegime("mu == rho <= lambda + r: the optimal policy is immediate liquidation");
    }

    FrontierSolution<Real> sol(p);
    sol.regime_ = regime;
    const Envelopes<Real> e(p);
    const Real beta = e.beta;
    const Real eps = machine_eps<Real>();

    using Vec = OdeState<Real, 2>;
    const auto nan_state = [] { return Vec{quiet_nan<Real>(), quiet_nan<Real>()}; };

    if (regime == Regime::Corner) {
        sol.series_.q0 = Real(opt.series_epsilon) / beta;
        sol.qstar_ = (e.spread - e.lambda) / (beta * e.spread);
        sol.zstar_ = beta * sol.qstar_ / (Real(1) - beta * sol.qstar_);
        sol.dn0_ = e.dm(Real(0));
        auto rhs = [&e, nan_state](const Real& q, const Vec&) {
            if (!e.inside(q)) return nan_state();
            const Real d = e.dm(q);
            return Vec{d, d / (e.beta * q)};
        };
        typename Dopri5<Real, 2, decltype(rhs)>::Options o;
        o.rtol = opt.rtol;
        o.atol = opt.atol;
        o.h_init = sol.series_.q0;
        o.h_max = e.inv_beta / Real(16);
        const Real q0 = sol.series_.q0;
        Dopri5<Real, 2, decltype(rhs)> stepper(rhs, q0, Vec{e.m(q0), Real(0)}, o);
        DenseStep<Real, 2> rec;
        while (sol.qstar_ - stepper.t() > Real(8) * eps * sol.qstar_) {
            const auto st = stepper.step(sol.qstar_, rec);
            if (st.underflow) {
                throw SolverFailure("step size underflow", to_double(stepper.t()), 0.0);
            }
            sol.dense_.push(rec);
        }
        sol.integral_star_ = sol.dense_(sol.qstar_)[1];
        sol.dense_.truncate_last(sol.qstar_);
        return sol;
    }

    sol.series_ = series_start<Real>(p, opt.series_epsilon);
    sol.dn0_ = e.dell(Real(0)) + sol.series_.alpha;
    const Real q0 = sol.series_.q0;
    const Real n0 = e.ell(q0) + q0 * (sol.series_.alpha + Real(0.5) * sol.series_.chi2 * q0);

    auto rhs = [&e, nan_state](const Real& q, const Vec& y) {
        if (!e.inside(q)) return nan_state();
        const Real chi = y[0] - e.ell(q);
        if (!(chi > Real(0))) return nan_state();
        const Real o = transformed_rhs(e, q, chi);
        return Vec{o, o / (e.beta * q)};
    };
    typename Dopri5<Real, 2, decltype(rhs)>::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_init = q0;
    o.h_max = e.inv_beta / Real(16);
    Dopri5<Real, 2, decltype(rhs)> stepper(rhs, q0, Vec{n0, Real(0)}, o);

    const Real q_limit = e.inv_beta * (Real(1) - Real(1e-9));
    const Real floor = opt.contact_floor;
    DenseStep<Real, 2> rec;
    for (;;) {
        const auto st = stepper.step(q_limit, rec);
        const Real t = stepper.t();
        const Real chi = stepper.y()[0] - e.ell(t);
        if (st.underflow) {
            throw SolverFailure("step size underflow", to_double(t), to_double(chi));
        }
        sol.dense_.push(rec);
        if (chi < floor) {
            throw SolverFailure("trajectory reached the lower envelope", to_double(t), to_double(chi));
        }
        if (stepper.y()[0] - e.m(t) >= Real(0)) {
            const Real qs = bisect_crossing(rec, [&](const Real& q) { return rec.eval(q)[0] - e.m(q); });
            sol.qstar_ = qs;
            sol.zstar_ = beta * qs / (Real(1) - beta * qs);
            sol.integral_star_ = rec.eval(qs)[1];
            sol.dense_.truncate_last(qs);
            return sol;
        }
        if (t >= q_limit) {
            throw SolverFailure("no crossing with the upper envelope before 1/beta", to_double(t),
                                to_double(e.m(t) - stepper.y()[0]));
        }
    }
}

double solve_frontier_b(const ModelParams& p, const SolverOptions& opt) {
    using std::sqrt;
    if (classify_regime(p) != Regime::General) {
        throw UnsupportedRegime("the b formulation requires mu != rho");
    }
    const Envelopes<double> e(p);
    const double beta = e.beta;
    const double kappa = e.kappa;
    const double a = e.spread - e.lambda;
    const double scale = (e.beta + e.lambda) / beta;

    // b(q) ~ kappa/beta + s q with (s - a)(kappa + s) = (beta + lambda) kappa, s < -kappa
    const double lin = kappa - a;
    const double slope = (-lin - sqrt(lin * lin + 4.0 * kappa * (a + e.beta + e.lambda))) / 2.0;
    const double q0 = 0.1 * opt.series_epsilon / beta;

    using Vec = OdeState<double, 1>;
    auto rhs = [&e, kappa, scale](double q, const Vec& y) {
        if (!e.inside(q)) return Vec{quiet_nan<double>()};
        const double denom = kappa * (e.inv_beta - q) - y[0];  // ((beta+lambda)/beta) chi
        if (!(denom > 0.0)) return Vec{quiet_nan<double>()};
        const double bq = e.beta * q;
        const double d = e.spread - e.lambda / (1.0 - bq) - scale * e.beta * bq / (1.0 - bq) * y[0] / denom;
        return Vec{d};
    };
    Dopri5<double, 1, decltype(rhs)>::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.h_init = q0;
    o.h_max = e.inv_beta / 16.0;
    Dopri5<double, 1, decltype(rhs)> stepper(rhs, q0, Vec{kappa / beta + slope * q0}, o);

    const double q_limit = e.inv_beta * (1.0 - 1e-9);
    DenseStep<double, 1> rec;
    for (;;) {
        const auto st = stepper.step(q_limit, rec);
        const double t = stepper.t();
        if (st.underflow) {
            throw SolverFailure("step size underflow", t, stepper.y()[0] / scale);
        }
        if (stepper.y()[0] <= 0.0) {
            // first zero of b, located on the interpolant
            return bisect_crossing(rec, [&](double q) { return -rec.eval(q)[0]; });
        }
        if (t >= q_limit) {
            throw SolverFailure("b did not vanish before 1/beta", t, stepper.y()[0] / scale);
        }
    }
}

void write_curve_csv(const FrontierSolution<double>& solution, std::ostream& out) {
    const auto old_prec = out.precision(12);
    out << "q,n,m,ell,nprime\n";
    for (const auto& c : solution.curve()) {
        out << c.q << ',' << c.n << ',' << c.m << ',' << c.ell << ',' << c.nprime << '\n';
    }
    out.precision(old_prec);
}

template class FrontierSolution<double>;
template class FrontierSolution<Quad>;
template SeriesCoefficients<double> series_start<double>(const ModelParams&, double);
template SeriesCoefficients<Quad> series_start<Quad>(const ModelParams&, double);
template double rhs_O<double>(double, double, const ModelParams&);
template Quad rhs_O<Quad>(Quad, Quad, const ModelParams&);
template FrontierSolution<double> solve_frontier<double>(const ModelParams&, const SolverOptions&);
template FrontierSolution<Quad> solve_frontier<Quad>(const ModelParams&, const SolverOptions&);

}  // namespace divopt
