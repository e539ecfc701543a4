#pragma once

// Finite-difference certificate for the variational inequality
//
//     min(-LV, -MV) = 0,
//     LV = -ln V_x - 1 + r x V_x + rho s V_s - kappa V_s^2 / V_ss - (beta + lambda) V + lambda F(x),
//     MV = V_x - V_s.
//
// Derivatives come from centred differences of PolicyEngine::value only; the
// semi-analytic derivatives of the engine are never consulted.

#include "divopt/policy.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace divopt {

struct GridSpec {
    std::size_t n_z = 64;
    std::size_t n_x = 64;
    /// z range as multiples of z*; absolute when the regime has z* = 0.
    double z_lo = 1e-3;
    double z_hi = 10.0;
    double x_lo = 0.5;
    double x_hi = 2.0;
};

struct VerifyTolerances {
    double l_nodiv = 5e-4;   ///< max |LV| where no dividend is paid
    double m_nodiv = 1e-6;   ///< MV <= this where no dividend is paid
    double m_div = 1e-8;     ///< max |MV| in the dividend region
    double l_div = 1e-6;     ///< LV <= this in the dividend region
    double g_jump = 1e-8;    ///< value jump at z*
    double g1_jump = 1e-6;   ///< z g' jump at z*
    double g2_jump = 1e-4;   ///< z^2 g'' jump at z*
    double fd_ratio = 3.0;   ///< |LV| reduction when the step is halved
};

struct VerifyConfig {
    GridSpec grid;
    double fd_step = 1e-4;   ///< relative to min(s, x)
    bool richardson = false;
    bool check_convergence = true;
    VerifyTolerances tol;
};

/// LV and MV at one node. `concave` is false when the stencil's V_ss >= 0;
/// L is then NaN rather than the result of a division by a non-negative number.
struct NodeResidual {
    double s = 0.0;
    double x = 0.0;
    double z = 0.0;
    Region region = Region::NoDividend;
    double l = 0.0;
    double m = 0.0;
    bool concave = true;
};

struct SmoothFit {
    double g_jump = 0.0;
    double g1_jump = 0.0;
    double g2_jump = 0.0;
};

struct ResidualReport {
    Regime regime = Regime::General;
    GridSpec grid;
    double fd_step = 0.0;
    bool richardson = false;
    VerifyTolerances tol;
    double zstar = 0.0;

    std::size_t nodes_nodiv = 0;
    std::size_t nodes_div = 0;
    std::size_t concavity_violations = 0;

    double max_abs_L_residual_nodiv = 0.0;
    double max_M_violation_nodiv = 0.0;
    double max_L_violation_div = 0.0;
    double max_abs_M_residual_div = 0.0;

    std::optional<SmoothFit> smooth_fit;  ///< absent in the degenerate regime
    std::optional<double> max_abs_L_residual_nodiv_half;  ///< same sweep at fd_step / 2
    std::optional<double> fd_ratio;

    bool pass_l_nodiv = true;
    bool pass_m_nodiv = true;
    bool pass_l_div = true;
    bool pass_m_div = true;
    bool pass_concavity = true;
    bool pass_smooth_fit = true;
    bool pass_convergence = true;
    bool pass = true;

    std::vector<NodeResidual> nodes;
};

/// Rounds v > 0 to the nearest value with a 24-bit significand so sums of
/// grid coordinates and power-of-two steps stay exact in double.
[[nodiscard]] double dyadic_round(double v);

/// Largest power of two not above v > 0.
[[nodiscard]] double pow2_floor(double v);

template <class Real>
[[nodiscard]] NodeResidual residual_at(const PolicyEngine<Real>& engine, double s, double x,
                                       double fd_step, bool richardson = false);

/// LV alone at one node (NaN on a concavity violation).
template <class Real>
[[nodiscard]] double residual_L(const PolicyEngine<Real>& engine, double s, double x, double fd_step);

/// MV alone at one node.
template <class Real>
[[nodiscard]] double residual_M(const PolicyEngine<Real>& engine, double s, double x, double fd_step);

/// Left and right limits of z g'(z) and z^2 g''(z) at z*, with g(z) = V(z, 1);
/// the left side by one-sided differences in ln z, the right side in closed form.
template <class Real>
[[nodiscard]] SmoothFit smooth_fit_errors(const PolicyEngine<Real>& engine);

/// Sweeps the grid; nodes with s == 0 are excluded by construction.
template <class Real>
[[nodiscard]] ResidualReport verify(const PolicyEngine<Real>& engine, const VerifyConfig& config = {},
                                    unsigned threads = 1);

/// Columns s,x,z,region,L_residual,M_residual.
void write_node_csv(const ResidualReport& report, std::ostream& out);

}  // namespace divopt
