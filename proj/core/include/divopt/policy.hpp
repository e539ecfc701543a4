#pragma once

// Value function and feedback controls reconstructed from the frontier.
//
// In the no-dividend region 0 < z = s/x <= z*, the transformed coordinate
// q = s V_s solves ln z(q) = ln(beta q/(1 - beta q)) - int_q^{q*} n'/(beta v) dv
// and
//
//     V(s, x) = (1/beta) ln x + N(q) + K,   N(q) = (n(q) - ln(1/beta - q)) / beta.
//
// Above the barrier V depends on s + x only. The degenerate regime has no
// frontier and V(s, x) = F(s + x).

#include "divopt/frontier.hpp"
#include "divopt/market_model.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <type_traits>
#include <vector>

namespace divopt {

enum class Region {
    NoDividend,   ///< 0 < s/x <= z*
    DividendPay,  ///< s/x > z*, or any s > 0 in the degenerate regime
    BoundaryS0,   ///< s == 0
    BoundaryX0,   ///< x == 0, s > 0
};

[[nodiscard]] std::string_view to_string(Region region);

template <class Real = double>
struct ValueBreakdown {
    Real v{};
    Region region = Region::NoDividend;
    Real z{};     ///< s/x, +inf when x == 0
    Real q{};     ///< s V_s; q* above the barrier, NaN where undefined
    Real v_s{};
    Real v_x{};
    Real v_ss{};
};

/// Solver options matched to the working precision.
template <class Real>
[[nodiscard]] SolverOptions default_solver_options() {
    if constexpr (std::is_same_v<Real, double>) return SolverOptions{};
    else return SolverOptions::extended();
}

template <class Real = double>
class PolicyEngine {
public:
    /// Solves the frontier when the regime needs one.
    explicit PolicyEngine(const ModelParams& params,
                          const SolverOptions& options = default_solver_options<Real>());
    explicit PolicyEngine(FrontierSolution<Real> frontier);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] Regime regime() const noexcept { return regime_; }
    [[nodiscard]] bool has_frontier() const noexcept { return frontier_.has_value(); }
    /// Throws UnsupportedRegime in the degenerate regime.
    [[nodiscard]] const FrontierSolution<Real>& frontier() const;
    /// Zero in the degenerate regime.
    [[nodiscard]] Real zstar() const;
    [[nodiscard]] Real qstar() const;

    /// z(q) on [0, q*]; exact at both endpoints.
    [[nodiscard]] Real z_of_q(Real q) const;
    /// Inverse of z_of_q on [0, z*].
    [[nodiscard]] Real q_of_z(Real z) const;

    /// Throws DomainError for (0, 0) and invalid states.
    [[nodiscard]] ValueBreakdown<Real> value(Real s, Real x) const;

    /// theta(z) = 1/(1 - 1/N'(q(z))) for 0 < z <= z*.
    [[nodiscard]] Real theta(Real z) const;
    /// theta as a function of q, including the q = 0 limit.
    [[nodiscard]] Real theta_of_q(Real q) const;
    /// Consumption per unit wealth 1/(1/beta - q(z)) for 0 <= z <= z*.
    [[nodiscard]] Real consumption_ratio(Real z) const;

    /// ((mu - rho)/sigma^2) theta(s/x); zero in the corner regime.
    [[nodiscard]] Real pi_star(Real s, Real x) const;
    /// x/(1/beta - q(s/x)); beta (s + x) in the degenerate regime.
    [[nodiscard]] Real c_star(Real s, Real x) const;
    /// Lump payment (s - z* x)/(1 + z*), or s when liquidating. Throws
    /// NoActionError strictly inside the no-dividend region.
    [[nodiscard]] Real dividend_action(Real s, Real x) const;

    /// Constant part of the dividend-region value.
    [[nodiscard]] Real dividend_constant() const;
    /// Constant K of the no-dividend value.
    [[nodiscard]] Real interior_constant() const;

private:
    void check_interior_z(const Real& z, const char* who) const;

    ModelParams params_;
    Regime regime_;
    std::optional<FrontierSolution<Real>> frontier_;
};

struct PolicyRow {
    State state;
    double z = 0.0;
    Region region = Region::NoDividend;
    double v = 0.0;
    double pi_star = 0.0;  ///< at the post-dividend state
    double c_star = 0.0;   ///< at the post-dividend state
    double dividend = 0.0;
};

/// Evaluates value and action at each state; controls refer to the state
/// after any lump dividend has been paid.
[[nodiscard]] std::vector<PolicyRow> evaluate_batch(const PolicyEngine<double>& engine,
                                                    const std::vector<State>& states);

/// Reads a CSV with header s,x. Throws ConfigError on malformed input.
[[nodiscard]] std::vector<State> read_states_csv(std::istream& in);

/// Columns s,x,z,region,V,pi_star,c_star,dividend.
void write_batch_csv(const std::vector<PolicyRow>& rows, std::ostream& out);

extern template class PolicyEngine<double>;
extern template class PolicyEngine<Quad>;

}  // namespace divopt
