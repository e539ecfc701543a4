#pragma once

// Free-boundary solver for the transformed value function n(q).
//
// For mu != rho, n solves the singular first-order ODE
//
//     n'(q) = O(q, n) = beta^2 q / (1 - beta q) * (m(q) - n) / (n - ell(q)),   n(0) = ell(0),
//
// on the branch leaving the origin above ell, and the dividend boundary q* is
// the first crossing of n with m. For mu == rho > lambda + r, n = m and q* is
// the turning point of m. The solution also carries the cumulative integral
//
//     I(q) = int_{q0}^{q} n'(v) / (beta v) dv
//
// that links the transformed coordinate to the equity/wealth ratio z.

#include "divopt/dopri5.hpp"
#include "divopt/market_model.hpp"
#include "divopt/real.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace divopt {

/// Local expansion of chi = n - ell at the singular origin.
template <class Real = double>
struct SeriesCoefficients {
    Real a00{};    ///< A(0,0) = beta^2 kappa / (beta + lambda)
    Real b0{};     ///< B(0) = -(beta/(beta+lambda)) (rho - r + kappa - lambda)
    Real alpha{};  ///< chi'(0+), positive root of y^2 - B(0) y - A(0,0) = 0
    Real chi2{};   ///< chi''(0+)
    Real q0{};     ///< start abscissa epsilon / beta
};

using SeriesStart = SeriesCoefficients<double>;

/// Throws UnsupportedRegime unless the regime is General and
/// DomainError unless 0 < epsilon < 1e-3.
template <class Real = double>
[[nodiscard]] SeriesCoefficients<Real> series_start(const ModelParams& params, double epsilon = 1e-6);

/// O(q, n). Throws DomainError outside 0 < q < 1/beta and SingularityError for n == ell(q).
template <class Real = double>
[[nodiscard]] Real rhs_O(Real q, Real n, const ModelParams& params);

struct SolverOptions {
    double q_tol = 1e-9;           ///< accuracy contract on q*
    double rtol = 1e-12;
    double atol = 1e-14;
    double series_epsilon = 1e-6;  ///< q0 = series_epsilon / beta
    double contact_floor = 1e-14;  ///< abort if n - ell falls below this after q0

    /// Tolerances for the binary128 pipeline.
    static SolverOptions extended() {
        SolverOptions o;
        o.rtol = 1e-22;
        o.atol = 1e-26;
        o.series_epsilon = 1e-9;
        o.contact_floor = 1e-30;
        return o;
    }
};

/// Point of the transformed solution, for diagnostics.
struct CurvePoint {
    double q = 0.0;
    double n = 0.0;
    double m = 0.0;
    double ell = 0.0;
    double nprime = 0.0;
};

template <class Real = double>
class FrontierSolution;

/// Integrates the transformed ODE and locates q*. Corner parameters return the
/// closed-form frontier n = m with the z-link integral still computed by
/// quadrature. Throws UnsupportedRegime for degenerate parameters and
/// SolverFailure when the integration breaks down.
template <class Real = double>
[[nodiscard]] FrontierSolution<Real> solve_frontier(const ModelParams& params,
                                                    const SolverOptions& options = {});

template <class Real>
class FrontierSolution {
public:
    [[nodiscard]] Regime regime() const noexcept { return regime_; }
    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const Real& qstar() const noexcept { return qstar_; }
    /// beta q* / (1 - beta q*).
    [[nodiscard]] const Real& zstar() const noexcept { return zstar_; }
    /// alpha and chi2 are zero in the corner regime.
    [[nodiscard]] const SeriesCoefficients<Real>& series() const noexcept { return series_; }
    [[nodiscard]] std::size_t step_count() const noexcept { return dense_.size(); }

    /// n(q) on [0, q*].
    [[nodiscard]] Real n(Real q) const;
    /// n'(q) on [0, q*]; O(q, n(q)) above q0.
    [[nodiscard]] Real dn(Real q) const;
    /// N(q) = (n(q) - ln(1/beta - q)) / beta.
    [[nodiscard]] Real big_n(Real q) const;
    /// N'(q) = n'(q)/beta + 1/(1 - beta q).
    [[nodiscard]] Real big_dn(Real q) const;
    /// ln z(q) = ln(beta q/(1 - beta q)) - int_q^{q*} n'(v)/(beta v) dv for q in (0, q*].
    [[nodiscard]] Real log_z(Real q) const;
    /// int_q^{q*} n'(v)/(beta v) dv.
    [[nodiscard]] Real tail_integral(Real q) const;

    /// Accepted integration nodes plus q*.
    [[nodiscard]] std::vector<CurvePoint> curve() const;

    template <class R>
    friend FrontierSolution<R> solve_frontier(const ModelParams&, const SolverOptions&);

private:
    explicit FrontierSolution(const ModelParams& p) : params_(p) {}

    void check_domain(const Real& q, const char* who) const;
    [[nodiscard]] Real cumulative(const Real& q) const;

    ModelParams params_;
    Regime regime_ = Regime::General;
    SeriesCoefficients<Real> series_{};
    Real qstar_{};
    Real zstar_{};
    Real integral_star_{};
    Real dn0_{};  ///< n'(0+)
    DenseOutput<Real, 2> dense_;  ///< components: n, I
};

/// Independent route: integrates b = ((beta+lambda)/beta)(m - n) from its own
/// first-order expansion at the origin and returns the first zero of b.
[[nodiscard]] double solve_frontier_b(const ModelParams& params, const SolverOptions& options = {});

/// Writes the curve as CSV with columns q,n,m,ell,nprime.
void write_curve_csv(const FrontierSolution<double>& solution, std::ostream& out);

extern template class FrontierSolution<double>;
extern template class FrontierSolution<Quad>;

}  // namespace divopt
