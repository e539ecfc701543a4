#pragma once

// Monte Carlo evaluation of feedback policies.
//
// Default is integrated out: the simulated objective is
//
//     E int_0^T e^{-(beta + lambda) t} (ln c_t + lambda F(X_t)) dt,
//
// with S following the leveraged equity dynamics under Euler-Maruyama, X
// accruing at r minus consumption, and any excess of S/X over the barrier
// paid out as a lump that restores the ratio exactly.

#include "divopt/policy.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace divopt {

struct PolicySpec {
    enum class Kind { OptimalFeedback, ConstantBarrier, ImmediateLiquidation };

    Kind kind = Kind::OptimalFeedback;
    double barrier = 0.0;      ///< z-bar, ConstantBarrier only
    double leverage = 0.0;     ///< pi-bar, ConstantBarrier only
    double consumption = 0.0;  ///< c-bar, consumption per unit wealth, ConstantBarrier only

    [[nodiscard]] static PolicySpec optimal() { return {}; }
    [[nodiscard]] static PolicySpec liquidation() { return {Kind::ImmediateLiquidation, 0.0, 0.0, 0.0}; }
    /// Throws ConfigError unless barrier > 0 and consumption > 0.
    [[nodiscard]] static PolicySpec constant_barrier(double barrier, double leverage, double consumption);

    [[nodiscard]] std::string label() const;
};

[[nodiscard]] std::string_view to_string(PolicySpec::Kind kind);

struct SimConfig {
    double s0 = 1.0;
    double x0 = 2.0;
    double dt = 1e-3;
    double horizon = 100.0;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20240601;
    PolicySpec policy;
    /// Normals summed per step. A run with dt and coupling k sees the same
    /// Brownian path as a run with dt/k and coupling 1.
    unsigned coupling = 1;
};

/// Throws ConfigError on invalid settings, including horizon (beta + lambda) < 12.
void validate(const SimConfig& config, const ModelParams& params);

struct SimReport {
    PolicySpec policy;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_valid = 0;
    std::size_t n_invalid = 0;
    double invalid_fraction = 0.0;
    double dt = 0.0;
    double horizon = 0.0;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    double min_z = 0.0;               ///< over all paths and steps, before projection
    double max_z = 0.0;
    double max_barrier_excess = 0.0;  ///< Z - barrier after projection
    double max_wealth_jump = 0.0;     ///< relative change of S + X across a lump
    double mean_dividends = 0.0;      ///< undiscounted lump total per valid path
    double value_at_start = 0.0;      ///< V(s0, x0) from the engine
    bool deterministic = false;       ///< a single path represents every path
    std::vector<double> path_values;  ///< NaN for invalid paths
};

[[nodiscard]] SimReport simulate(const SimConfig& config, const PolicyEngine<double>& engine,
                                 unsigned threads = 1);

/// Runs every configuration with common random numbers and sorts by estimate, best first.
[[nodiscard]] std::vector<SimReport> policy_tournament(const std::vector<SimConfig>& configs,
                                                       const PolicyEngine<double>& engine,
                                                       unsigned threads = 1);

struct PairedDifference {
    double mean = 0.0;    ///< a - b over paths valid in both
    double stderr_ = 0.0;
    std::size_t n = 0;
};

/// Requires reports from runs with the same seed and path count.
[[nodiscard]] PairedDifference paired_difference(const SimReport& a, const SimReport& b);

/// Barrier perturbations 0.5 z*, 2 z* and leverage perturbations 0.5 pi*(z*),
/// 2 pi*(z*), each holding the other two controls at their values at z*.
[[nodiscard]] std::vector<PolicySpec> standard_perturbations(const PolicyEngine<double>& engine);

/// Simulates path `path` of the configuration and writes every `stride`-th
/// step as t,S,X,Z,pi,c,dividend_paid.
void write_trace_csv(const SimConfig& config, const PolicyEngine<double>& engine, std::ostream& out,
                     std::size_t path = 0, std::size_t stride = 1);

}  // namespace divopt
