#include "divopt/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace divopt {

ModelParams::ModelParams(const ParamSet& values) : v_(values) {
    const double fields[] = {v_.mu, v_.sigma, v_.rho, v_.r, v_.beta, v_.lambda};
    for (double f : fields) {
        if (!std::isfinite(f)) {
            throw ConfigError("model parameters must be finite");
        }
    }
    if (!(v_.sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (!(v_.beta > 0.0)) throw ConfigError("beta must be > 0");
    if (!(v_.lambda > 0.0)) throw ConfigError("lambda must be > 0");
}

ModelParams ModelParams::with(std::string_view name, double value) const {
    ParamSet v = v_;
    if (name == "mu") v.mu = value;
    else if (name == "sigma") v.sigma = value;
    else if (name == "rho") v.rho = value;
    else if (name == "r") v.r = value;
    else if (name == "beta") v.beta = value;
    else if (name == "lambda") v.lambda = value;
    else throw ConfigError("unknown model parameter '" + std::string(name) + "'");
    return ModelParams(v);
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Degenerate: return "degenerate";
        case Regime::Corner: return "corner";
        case Regime::General: return "general";
    }
    return "unknown";
}

Regime classify_regime(const ModelParams& p) {
    if (p.mu() != p.rho()) return Regime::General;
    return p.rho() > p.lambda() + p.r() ? Regime::Corner : Regime::Degenerate;
}

void validate_state(const State& st) {
    if (!std::isfinite(st.s) || !std::isfinite(st.x)) {
        throw DomainError("state must be finite");
    }
    if (st.s < 0.0 || st.x < 0.0) {
        throw DomainError("state must be non-negative");
    }
    if (st.s == 0.0 && st.x == 0.0) {
        throw DomainError("state (0, 0) is not admissible");
    }
}

double m_turning_point(const ModelParams& p) {
    const double spread = p.rho() - p.r() - p.lambda();
    if (spread <= 0.0) return 0.0;
    return spread / (p.beta() * (p.rho() - p.r()));
}

double qstar_lower_bound(const ModelParams& p) {
    const double spread = std::max(p.rho() - p.r() - p.lambda(), 0.0);
    return spread / (spread + p.lambda()) / p.beta();
}

}  // namespace divopt
