#include "divopt/hjb_verifier.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace divopt {

double dyadic_round(double v) {
    int e = 0;
    std::frexp(v, &e);
    return std::ldexp(std::nearbyint(std::ldexp(v, 24 - e)), e - 24);
}

double pow2_floor(double v) {
    int e = 0;
    std::frexp(v, &e);
    return std::ldexp(0.5, e);
}

namespace {

template <class Real>
struct Derivs {
    Real v{}, v_s{}, v_x{}, v_ss{}, m{};
};

template <class Real>
Derivs<Real> centred(const PolicyEngine<Real>& engine, const Real& s, const Real& x, const Real& h) {
    const auto V = [&](const Real& a, const Real& b) { return engine.value(a, b).v; };
    Derivs<Real> d;
    d.v = V(s, x);
    const Real vsp = V(s + h, x);
    const Real vsm = V(s - h, x);
    const Real vxp = V(s, x + h);
    const Real vxm = V(s, x - h);
    const Real two_h = Real(2) * h;
    d.v_s = (vsp - vsm) / two_h;
    d.v_x = (vxp - vxm) / two_h;
    d.v_ss = (vsp - Real(2) * d.v + vsm) / (h * h);
    // same step in both directions, so V(s + h, x) == V(s, x + h) wherever V depends on s + x only
    d.m = ((vxp - vxm) - (vsp - vsm)) / two_h;
    return d;
}

template <class Real>
Derivs<Real> derivatives(const PolicyEngine<Real>& engine, double s, double x, double fd_step, bool richardson) {
    const double h = pow2_floor(fd_step * std::min(s, x));
    const Derivs<Real> coarse = centred(engine, Real(s), Real(x), Real(h));
    if (!richardson) return coarse;
    const Derivs<Real> fine = centred(engine, Real(s), Real(x), Real(h / 2));
    const auto extrap = [](const Real& f, const Real& c) { return (Real(4) * f - c) / Real(3); };
    Derivs<Real> d;
    d.v = coarse.v;
    d.v_s = extrap(fine.v_s, coarse.v_s);
    d.v_x = extrap(fine.v_x, coarse.v_x);
    d.v_ss = extrap(fine.v_ss, coarse.v_ss);
    d.m = extrap(fine.m, coarse.m);
    return d;
}

template <class Real>
Real generator(const PolicyEngine<Real>& engine, const Derivs<Real>& d, const Real& s, const Real& x) {
    using std::log;
    const ModelParams& p = engine.params();
    const Real kappa = p.kappa();
    Real lv = -log(d.v_x) - Real(1) + Real(p.r()) * d.v_x * x + Real(p.rho()) * d.v_s * s -
              Real(p.beta() + p.lambda()) * d.v + Real(p.lambda()) * post_default_value<Real>(x, p);
    if (kappa != Real(0)) lv -= kappa * d.v_s * d.v_s / d.v_ss;
    return lv;
}

}  // namespace

template <class Real>
NodeResidual residual_at(const PolicyEngine<Real>& engine, double s, double x, double fd_step, bool richardson) {
    if (!(s > 0.0) || !(x > 0.0)) throw DomainError("residual: s and x must be positive");
    if (!(fd_step > 0.0 && fd_step < 0.5)) throw DomainError("residual: fd_step must lie in (0, 0.5)");
    NodeResidual out;
    out.s = s;
    out.x = x;
    out.z = s / x;
    out.region = engine.value(Real(s), Real(x)).region;
    const Derivs<Real> d = derivatives(engine, s, x, fd_step, richardson);
    out.m = to_double(d.m);
    out.concave = d.v_ss < Real(0);
    out.l = out.concave ? to_double(generator(engine, d, Real(s), Real(x)))
                        : std::numeric_limits<double>::quiet_NaN();
    return out;
}

template <class Real>
double residual_L(const PolicyEngine<Real>& engine, double s, double x, double fd_step) {
    return residual_at(engine, s, x, fd_step).l;
}

template <class Real>
double residual_M(const PolicyEngine<Real>& engine, double s, double x, double fd_step) {
    return residual_at(engine, s, x, fd_step).m;
}

template <class Real>
SmoothFit smooth_fit_errors(const PolicyEngine<Real>& engine) {
    using std::abs;
    using std::exp;
    using std::log;
    const auto& f = engine.frontier();
    const Real beta = engine.params().beta();
    const Real zs = f.zstar();
    const Real us = log(zs);
    // fourth-order one-sided stencils in u = ln z, taken from below z*
    const Real h = std::is_same_v<Real, double> ? Real(1.0 / 128) : Real(1.0 / 4096);
    Real g[6];
    for (int k = 0; k < 6; ++k) {
        const Real z = k == 0 ? zs : exp(us - Real(k) * h);
        g[k] = engine.value(z, Real(1)).v;
    }
    const Real dg = (Real(25) * g[0] - Real(48) * g[1] + Real(36) * g[2] - Real(16) * g[3] + Real(3) * g[4]) /
                    (Real(12) * h);
    const Real d2g = (Real(45) * g[0] - Real(154) * g[1] + Real(214) * g[2] - Real(156) * g[3] +
                      Real(61) * g[4] - Real(10) * g[5]) /
                     (Real(12) * h * h);
    const Real left_g1 = dg;
    const Real left_g2 = d2g - dg;

    const Real right_g = log(Real(1) + zs) / beta + engine.dividend_constant();
    const Real right_g1 = zs / (beta * (Real(1) + zs));
    const Real right_g2 = -zs * zs / (beta * (Real(1) + zs) * (Real(1) + zs));

    SmoothFit out;
    out.g_jump = to_double(abs(g[0] - right_g));
    out.g1_jump = to_double(abs(left_g1 - right_g1));
    out.g2_jump = to_double(abs(left_g2 - right_g2));
    return out;
}

template <class Real>
ResidualReport verify(const PolicyEngine<Real>& engine, const VerifyConfig& config, unsigned threads) {
    const GridSpec& g = config.grid;
    if (g.n_z < 2 || g.n_x < 2) throw ConfigError("verify grid needs at least 2 x 2 nodes");
    if (!(g.z_lo > 0.0 && g.z_hi > g.z_lo && g.x_lo > 0.0 && g.x_hi > g.x_lo)) {
        throw ConfigError("verify grid bounds must be positive and increasing");
    }
    ResidualReport rep;
    rep.regime = engine.regime();
    rep.grid = g;
    rep.fd_step = config.fd_step;
    rep.richardson = config.richardson;
    rep.tol = config.tol;
    rep.zstar = to_double(engine.zstar());

    const double zscale = rep.zstar > 0.0 ? rep.zstar : 1.0;
    const auto log_node = [](double lo, double hi, std::size_t i, std::size_t n) {
        return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * double(i) / double(n - 1));
    };
    std::vector<std::pair<double, double>> points;
    points.reserve(g.n_z * g.n_x);
    for (std::size_t i = 0; i < g.n_z; ++i) {
        const double z = zscale * log_node(g.z_lo, g.z_hi, i, g.n_z);
        for (std::size_t j = 0; j < g.n_x; ++j) {
            const double x = dyadic_round(log_node(g.x_lo, g.x_hi, j, g.n_x));
            points.emplace_back(dyadic_round(z * x), x);
        }
    }

    rep.nodes.resize(points.size());
    detail::parallel_for(points.size(), threads, [&](std::size_t i) {
        rep.nodes[i] = residual_at(engine, points[i].first, points[i].second, config.fd_step, config.richardson);
    });

    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
        const NodeResidual& n = rep.nodes[i];
        if (n.region == Region::NoDividend) {
            ++rep.nodes_nodiv;
            interior.push_back(i);
            if (!n.concave) {
                ++rep.concavity_violations;
            } else {
                rep.max_abs_L_residual_nodiv = std::max(rep.max_abs_L_residual_nodiv, std::abs(n.l));
            }
            rep.max_M_violation_nodiv = std::max(rep.max_M_violation_nodiv, n.m);
        } else {
            ++rep.nodes_div;
            // the quadratic term is skipped when kappa = 0, so L stays defined
            if (std::isnan(n.l)) ++rep.concavity_violations;
            else rep.max_L_violation_div = std::max(rep.max_L_violation_div, n.l);
            rep.max_abs_M_residual_div = std::max(rep.max_abs_M_residual_div, std::abs(n.m));
        }
    }

    const VerifyTolerances& tol = config.tol;
    rep.pass_l_nodiv = rep.max_abs_L_residual_nodiv <= tol.l_nodiv;
    rep.pass_m_nodiv = rep.max_M_violation_nodiv <= tol.m_nodiv;
    rep.pass_l_div = rep.max_L_violation_div <= tol.l_div;
    rep.pass_m_div = rep.max_abs_M_residual_div <= tol.m_div;
    rep.pass_concavity = rep.concavity_violations == 0;

    if (config.check_convergence && !interior.empty()) {
        std::vector<double> half(interior.size());
        detail::parallel_for(interior.size(), threads, [&](std::size_t k) {
            const NodeResidual& n = rep.nodes[interior[k]];
            half[k] = residual_at(engine, n.s, n.x, config.fd_step / 2, config.richardson).l;
        });
        double worst = 0.0;
        for (double l : half) worst = std::isnan(l) ? worst : std::max(worst, std::abs(l));
        rep.max_abs_L_residual_nodiv_half = worst;
        rep.fd_ratio = worst > 0.0 ? rep.max_abs_L_residual_nodiv / worst
                                   : std::numeric_limits<double>::infinity();
        rep.pass_convergence = *rep.fd_ratio >= tol.fd_ratio;
    }

    if (engine.has_frontier()) {
        rep.smooth_fit = smooth_fit_errors(engine);
        rep.pass_smooth_fit = rep.smooth_fit->g_jump <= tol.g_jump && rep.smooth_fit->g1_jump <= tol.g1_jump &&
                              rep.smooth_fit->g2_jump <= tol.g2_jump;
    }

    rep.pass = rep.pass_l_nodiv && rep.pass_m_nodiv && rep.pass_l_div && rep.pass_m_div &&
               rep.pass_concavity && rep.pass_smooth_fit && rep.pass_convergence;
    return rep;
}

void write_node_csv(const ResidualReport& report, std::ostream& out) {
    const auto old_prec = out.precision(12);
    out << "s,x,z,region,L_residual,M_residual\n";
    for (const auto& n : report.nodes) {
        out << n.s << ',' << n.x << ',' << n.z << ',' << to_string(n.region) << ',' << n.l << ',' << n.m << '\n';
    }
    out.precision(old_prec);
}

#define DIVOPT_INSTANTIATE(R)                                                                          \
    template NodeResidual residual_at<R>(const PolicyEngine<R>&, double, double, double, bool);       \
    template double residual_L<R>(const PolicyEngine<R>&, double, double, double);                    \
    template double residual_M<R>(const PolicyEngine<R>&, double, double, double);                    \
    template SmoothFit smooth_fit_errors<R>(const PolicyEngine<R>&);                                  \
    template ResidualReport verify<R>(const PolicyEngine<R>&, const VerifyConfig&, unsigned);

DIVOPT_INSTANTIATE(double)
DIVOPT_INSTANTIATE(Quad)
#undef DIVOPT_INSTANTIATE

}  // namespace divopt
