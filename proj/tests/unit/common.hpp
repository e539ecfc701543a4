#pragma once

#include "divopt/market_model.hpp"

#include <cmath>
#include <vector>

namespace divopt::test {

inline ModelParams base_params() { return ModelParams(ParamSet{0.2, 0.3, 0.1, 0.02, 0.1, 0.05}); }
inline ModelParams corner_params() { return ModelParams(ParamSet{0.1, 0.3, 0.1, 0.02, 0.1, 0.05}); }
inline ModelParams degenerate_params() { return ModelParams(ParamSet{0.1, 0.3, 0.1, 0.02, 0.1, 0.1}); }

// Reference values from an independent scipy DOP853 integration (rtol 1e-13)
// of the n-ODE and of the b-ODE, with the z link evaluated by adaptive quadrature.
inline constexpr double kBaseQstar = 6.155958567456;
inline constexpr double kBaseZstar = 1.6014287763236;
inline constexpr double kBaseAlpha = 0.03869018331535704;
inline constexpr double kBaseChi2 = -0.0029800491120112824;
inline constexpr double kBaseV12 = -16.41787177820626;
inline constexpr double kBaseV04 = -24.142764629932522;  // V(0.4, 1)

/// mu in {0.05, 0.2}, rho in {0.02, 0.1}, sigma in {0.2, 0.4}, lambda in {0.02, 0.05, 0.1}, r = 0.02, beta = 0.1.
inline std::vector<ModelParams> battery() {
    std::vector<ModelParams> out;
    for (double mu : {0.05, 0.2}) {
        for (double rho : {0.02, 0.1}) {
            for (double sigma : {0.2, 0.4}) {
                for (double lambda : {0.02, 0.05, 0.1}) {
                    out.emplace_back(ParamSet{mu, sigma, rho, 0.02, 0.1, lambda});
                }
            }
        }
    }
    return out;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace divopt::test
