#pragma once

// Economic primitives of the dividend/leverage/consumption problem, the
// regime classification, and the closed-form building blocks F, m and ell.

#include "divopt/error.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace divopt {

/// Raw parameter values. Rates are per unit time, sigma per sqrt(time).
struct ParamSet {
    double mu = 0.0;      ///< risky-asset drift
    double sigma = 0.0;   ///< risky-asset volatility, > 0
    double rho = 0.0;     ///< corporate bond yield
    double r = 0.0;       ///< retail riskfree rate
    double beta = 0.0;    ///< subjective discount rate, > 0
    double lambda = 0.0;  ///< default intensity, > 0
};

/// Validated, immutable model parameters.
class ModelParams {
public:
    /// Throws ConfigError unless sigma, beta, lambda > 0 and all fields are finite.
    explicit ModelParams(const ParamSet& values);

    [[nodiscard]] const ParamSet& values() const noexcept { return v_; }
    [[nodiscard]] double mu() const noexcept { return v_.mu; }
    [[nodiscard]] double sigma() const noexcept { return v_.sigma; }
    [[nodiscard]] double rho() const noexcept { return v_.rho; }
    [[nodiscard]] double r() const noexcept { return v_.r; }
    [[nodiscard]] double beta() const noexcept { return v_.beta; }
    [[nodiscard]] double lambda() const noexcept { return v_.lambda; }

    /// (mu - rho)^2 / (2 sigma^2), the squared Sharpe term of the firm's asset.
    [[nodiscard]] double kappa() const noexcept {
        const double d = v_.mu - v_.rho;
        return d * d / (2.0 * v_.sigma * v_.sigma);
    }

    /// (mu - rho) / sigma^2, the frictionless risky fraction.
    [[nodiscard]] double merton_ratio() const noexcept {
        return (v_.mu - v_.rho) / (v_.sigma * v_.sigma);
    }

    /// Copy with one field replaced; `name` is one of mu, sigma, rho, r, beta, lambda.
    [[nodiscard]] ModelParams with(std::string_view name, double value) const;

    friend bool operator==(const ModelParams& a, const ModelParams& b) {
        return a.v_.mu == b.v_.mu && a.v_.sigma == b.v_.sigma && a.v_.rho == b.v_.rho &&
               a.v_.r == b.v_.r && a.v_.beta == b.v_.beta && a.v_.lambda == b.v_.lambda;
    }

private:
    ParamSet v_;
};

enum class Regime {
    Degenerate,  ///< mu == rho <= lambda + r: liquidate immediately
    Corner,      ///< mu == rho >  lambda + r: closed-form frontier
    General,     ///< mu != rho: frontier from the singular ODE
};

[[nodiscard]] std::string_view to_string(Regime regime);

/// mu == rho is tested exactly on the stored values.
[[nodiscard]] Regime classify_regime(const ModelParams& params);

/// Equity value and private wealth. Both non-negative and not both zero.
struct State {
    double s = 0.0;
    double x = 0.0;
};

/// Throws DomainError for negative, non-finite or (0, 0) states.
void validate_state(const State& state);

// ---------------------------------------------------------------------------
// Closed forms. Templates over the working scalar so the same expressions back
// both the double and the extended-precision pipelines.
// ---------------------------------------------------------------------------

/// (1/beta)(r/beta + ln beta - 1): constant part of the post-default value.
template <class Real = double>
[[nodiscard]] Real post_default_constant(const ModelParams& p) {
    using std::log;
    const Real beta = p.beta();
    return (Real(p.r()) / beta + log(beta) - Real(1)) / beta;
}

/// F(x) = (1/beta) ln x + (1/beta)(r/beta + ln beta - 1), the value of
/// consuming private wealth alone after default.
template <class Real = double>
[[nodiscard]] Real post_default_value(Real x, const ModelParams& p) {
    using std::log;
    if (!(x > Real(0))) {
        throw DomainError("post_default_value: wealth must be positive");
    }
    return log(x) / Real(p.beta()) + post_default_constant<Real>(p);
}

namespace detail {
template <class Real>
void check_q_domain(const Real& q, const ModelParams& p, const char* who) {
    if (!(q >= Real(0)) || !(q < Real(1) / Real(p.beta()))) {
        throw DomainError(std::string(who) + ": q must lie in [0, 1/beta)");
    }
}
}  // namespace detail

/// Upper envelope m(q) of the transformed value function.
template <class Real = double>
[[nodiscard]] Real eval_m(Real q, const ModelParams& p) {
    using std::log;
    detail::check_q_domain(q, p, "eval_m");
    const Real beta = p.beta();
    const Real lambda = p.lambda();
    const Real w = beta / (beta + lambda);
    return w * (Real(p.rho() - p.r()) * q + (lambda / beta) * log(Real(1) / beta - q) +
                Real(p.kappa()) / beta);
}

/// Lower envelope ell(q) = m(q) - (beta/(beta+lambda)) kappa (1/beta - q).
template <class Real = double>
[[nodiscard]] Real eval_ell(Real q, const ModelParams& p) {
    using std::log;
    detail::check_q_domain(q, p, "eval_ell");
    const Real beta = p.beta();
    const Real lambda = p.lambda();
    const Real w = beta / (beta + lambda);
    return w * ((Real(p.rho() - p.r()) + Real(p.kappa())) * q +
                (lambda / beta) * log(Real(1) / beta - q));
}

/// m'(q).
template <class Real = double>
[[nodiscard]] Real eval_dm(Real q, const ModelParams& p) {
    detail::check_q_domain(q, p, "eval_dm");
    const Real beta = p.beta();
    const Real lambda = p.lambda();
    return (beta * Real(p.rho() - p.r()) - lambda * beta / (Real(1) - beta * q)) /
           (beta + lambda);
}

/// ell'(q) = m'(q) + (beta/(beta+lambda)) kappa.
template <class Real = double>
[[nodiscard]] Real eval_dell(Real q, const ModelParams& p) {
    const Real beta = p.beta();
    return eval_dm<Real>(q, p) + beta / (beta + Real(p.lambda())) * Real(p.kappa());
}

/// Location of the maximum of m when rho - r - lambda > 0, else 0.
[[nodiscard]] double m_turning_point(const ModelParams& p);

/// (1/beta)(rho-r-lambda)^+ / ((rho-r-lambda)^+ + lambda): strict lower bound on q*.
[[nodiscard]] double qstar_lower_bound(const ModelParams& p);

}  // namespace divopt
