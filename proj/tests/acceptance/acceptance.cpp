// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number; the exit status is nonzero if any selected
// criterion fails.

#include "divopt/frontier.hpp"
#include "divopt/hjb_verifier.hpp"
#include "divopt/market_model.hpp"
#include "divopt/policy.hpp"
#include "divopt/simulator.hpp"
#include "divopt/statics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace divopt;

namespace {

const ModelParams kBase(ParamSet{0.2, 0.3, 0.1, 0.02, 0.1, 0.05});
const ModelParams kCorner(ParamSet{0.1, 0.3, 0.1, 0.02, 0.1, 0.05});
const ModelParams kDegenerate(ParamSet{0.1, 0.3, 0.1, 0.02, 0.1, 0.1});

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// mu, rho, sigma and lambda over their stated levels, plus lambda = 0.05 so the
// battery reaches 24 sets; every combination has mu != rho.
std::vector<ModelParams> battery() {
    std::vector<ModelParams> out;
    for (double mu : {0.05, 0.2})
        for (double rho : {0.02, 0.1})
            for (double sigma : {0.2, 0.4})
                for (double lambda : {0.02, 0.05, 0.1}) out.emplace_back(ParamSet{mu, sigma, rho, 0.02, 0.1, lambda});
    return out;
}

void corner_exactness(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolicyEngine<double> e(kCorner);
    const double qs = e.qstar();
    const double zs = e.zstar();
    const double b = kCorner.beta(), l = kCorner.lambda();
    const double a = kCorner.rho() - kCorner.r() - l, c = kCorner.rho() - kCorner.r();
    const double q_exact = a / (b * c);
    const auto closed = [&](double q) {
        return std::pow(a / l, l / (b + l)) * std::pow(q_exact, -c / (b + l)) *
               std::pow(b * q / (1 - b * q), b / (b + l)) * std::pow(q, c / (b + l));
    };
    double worst = 0.0;
    for (double q : log_grid(1e-3 * q_exact, q_exact, 50)) worst = std::max(worst, std::abs(e.z_of_q(q) - closed(q)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << "q*=" << qs << " z*=" << zs << " max|z(q)-closed|=" << worst << " over 50 points, " << secs << " s";
    o.require(std::abs(qs - 3.75) <= 1e-8, "q* = 3.75 to 1e-8");
    o.require(std::abs(zs - 0.6) <= 1e-8, "z* = 0.6 to 1e-8");
    o.require(worst <= 1e-6, "z(q) within 1e-6");
    o.require(secs < 1.0, "runtime < 1 s");
}

void dual_agreement(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sets = battery();
    double worst = 0.0;
    for (const auto& p : sets) {
        const double qn = solve_frontier(p).qstar();
        const double qb = solve_frontier_b(p);
        worst = std::max(worst, std::abs(qn - qb));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << sets.size() << " sets, max|q*_n - q*_b|=" << worst << ", " << secs << " s";
    o.require(sets.size() >= 20, "at least 20 sets");
    o.require(worst <= 1e-8, "agreement to 1e-8");
    o.require(secs < 10.0, "runtime < 10 s");
}

void analytic_bracket(Outcome& o) {
    std::size_t points = 0;
    double worst_bound = -1e300;
    for (const auto& p : battery()) {
        const auto f = solve_frontier(p);
        const double qs = f.qstar();
        const double alpha = f.series().alpha;
        o.require(qs > qstar_lower_bound(p) && qs < 1.0 / p.beta(), "q* strictly inside the bracket");
        std::vector<double> qs_grid;
        for (const auto& c : f.curve()) {
            if (c.q > 0.0 && c.q < qs) qs_grid.push_back(c.q);
        }
        for (double q : log_grid(1e-6 * qs, qs * (1 - 1e-9), 400)) qs_grid.push_back(q);
        std::sort(qs_grid.begin(), qs_grid.end());
        double prev = -1e300;
        for (double q : qs_grid) {
            const double n = f.n(q);
            const double m = eval_m(q, p), l = eval_ell(q, p);
            o.require(l < n && n < m, "ell < n < m");
            o.require(n > prev || q == qs_grid.front(), "n strictly increasing");
            worst_bound = std::max(worst_bound, (n - l) - alpha * q);
            prev = n;
            ++points;
            if (!o.pass) return;
        }
    }
    o.detail << points << " points over 24 sets, max(n - ell - alpha q)=" << worst_bound;
    o.require(worst_bound <= 1e-9, "n - ell <= alpha q + 1e-9");
}

void hjb_and_smooth_fit(Outcome& o4, Outcome& o5) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolicyEngine<Quad> e(kBase);
    VerifyConfig cfg;  // 64 x 64, fd_step 1e-4, centred second-order stencil
    const ResidualReport r = verify(e, cfg, worker_threads());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o4.detail << "max|LV|nodiv=" << r.max_abs_L_residual_nodiv << " max MV nodiv=" << r.max_M_violation_nodiv
              << " max|MV|div=" << r.max_abs_M_residual_div << " max LV div=" << r.max_L_violation_div
              << " fd ratio=" << r.fd_ratio.value_or(0.0) << " nodes " << r.nodes_nodiv << "/" << r.nodes_div
              << ", " << secs << " s";
    o4.require(r.concavity_violations == 0, "stencil concavity");
    o4.require(r.max_abs_L_residual_nodiv <= 5e-4, "|LV| <= 5e-4");
    o4.require(r.max_M_violation_nodiv <= 1e-6, "MV <= 1e-6");
    o4.require(r.max_abs_M_residual_div <= 1e-8, "|MV| <= 1e-8");
    o4.require(r.max_L_violation_div <= 1e-6, "LV <= 1e-6");
    o4.require(r.fd_ratio && *r.fd_ratio >= 3.0, "halving ratio >= 3");
    o4.require(secs < 5.0, "runtime < 5 s");

    const SmoothFit sf = r.smooth_fit.value_or(SmoothFit{1, 1, 1});
    o5.detail << "|z*g'(z*) - q*|=" << sf.g1_jump << " |z*^2 g''(z*) + beta q*^2|=" << sf.g2_jump
              << " value jump=" << sf.g_jump;
    o5.require(sf.g1_jump <= 1e-6, "first-order fit");
    o5.require(sf.g2_jump <= 1e-4, "second-order fit");
}

void degenerate_closed_form(Outcome& o) {
    const PolicyEngine<double> e(kDegenerate);
    const double v = e.value(1.0, 1.0).v;
    VerifyConfig cfg;
    cfg.grid.n_z = 32;
    cfg.grid.n_x = 32;
    const ResidualReport r = verify(e, cfg);
    o.detail << "V(1,1)=" << v << " max LV=" << r.max_L_violation_div << " max|MV|=" << r.max_abs_M_residual_div;
    o.require(std::abs(v - (-24.094379)) <= 1e-6, "V(1,1) = -24.094379");
    o.require(r.max_L_violation_div <= 0.0 && r.concavity_violations == 0, "LV <= 0");
    o.require(r.max_abs_M_residual_div == 0.0, "MV = 0 exactly");
}

void monte_carlo(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolicyEngine<double> e(kBase);
    SimConfig base;
    base.s0 = 1.0;
    base.x0 = 2.0;
    base.dt = 1e-3;
    base.horizon = 100.0;
    base.n_paths = 200000;
    std::vector<SimConfig> configs{base};
    for (const auto& p : standard_perturbations(e)) {
        SimConfig c = base;
        c.policy = p;
        configs.push_back(c);
    }
    const auto reports = policy_tournament(configs, e, worker_threads());
    const auto opt = std::find_if(reports.begin(), reports.end(), [](const SimReport& r) {
        return r.policy.kind == PolicySpec::Kind::OptimalFeedback;
    });
    const double v = e.value(1.0, 2.0).v;
    o.detail << "estimate=" << opt->estimate << " stderr=" << opt->stderr_ << " V(1,2)=" << v
             << " invalid=" << opt->n_invalid;
    o.require(std::abs(opt->estimate - v) <= 3.0 * opt->stderr_, "|estimate - V| <= 3 stderr");
    for (const auto& r : reports) {
        if (&r == &*opt) continue;
        const PairedDifference d = paired_difference(*opt, r);
        o.detail << "; vs " << r.policy.label() << " " << d.mean << "+-" << d.stderr_;
        o.require(d.mean >= -3.0 * d.stderr_, "optimal beats " + r.policy.label());
    }
    o.detail << ", " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s";
}

void comparative_statics(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> lambdas;
    for (int i = 1; i <= 15; ++i) lambdas.push_back(0.01 * i);
    const SweepTable t = sweep(kBase, "lambda", lambdas, {}, worker_threads());
    {
        std::ofstream csv("acceptance_lambda_sweep.csv");
        write_sweep_csv(t, csv);
    }
    std::size_t checks = 0;
    const auto expect = [&](const SweepTable& table, const std::string& col, Direction d) {
        const MonotonicityResult m = monotonicity_check(table, col, d);
        ++checks;
        o.require(m.pass, table.param_name + ":" + m.message);
    };
    expect(t, "zstar", Direction::Decreasing);
    for (const auto& name : t.column_names()) {
        if (name.rfind("pi_zmin", 0) == 0) expect(t, name, Direction::Increasing);
        if (name.rfind("cbar_", 0) == 0) expect(t, name, Direction::Decreasing);
    }
    expect(sweep(kBase, "r", {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}), "zstar", Direction::Decreasing);
    expect(sweep(kBase, "sigma", {0.2, 0.25, 0.3, 0.35, 0.4, 0.5}), "zstar", Direction::Decreasing);
    expect(sweep(kBase, "mu", {0.12, 0.15, 0.2, 0.25, 0.3}), "zstar", Direction::Increasing);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << checks << " strict monotonicity checks, lambda table in acceptance_lambda_sweep.csv, " << secs << " s";
    o.require(secs < 30.0, "runtime < 30 s");
}

void policy_limits(Outcome& o) {
    const PolicyEngine<double> e(kBase);
    const double zs = e.zstar();
    const double cbar = e.consumption_ratio(1e-6 * zs);
    const double tq = e.theta(zs) * kBase.beta() * e.qstar();
    o.detail << "cbar(1e-6 z*)=" << cbar << " theta(z*) beta q*=" << tq;
    o.require(std::abs(cbar - kBase.beta()) <= 1e-4, "cbar -> beta");
    o.require(std::abs(tq - 1.0) <= 1e-8, "theta(z*) beta q* = 1");
    std::size_t sets = 0;
    for (const auto& p : battery()) {
        const PolicyEngine<double> eng(p);
        const double z_star = eng.zstar();
        double prev = 1e300;
        for (double z : log_grid(1e-6 * z_star, z_star, 100)) {
            const double t = eng.theta(z);
            o.require(t > 1.0, "theta > 1");
            o.require(t < prev, "theta strictly decreasing");
            prev = t;
        }
        if (p.mu() > p.rho()) o.require(std::abs(eng.pi_star(z_star, 1.0)) > p.merton_ratio(), "|pi*(z*)| > Merton");
        ++sets;
    }
    o.detail << ", theta checked on " << sets << " sets";
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    const auto want = [&](int k) { return selected.empty() || selected.count(k) > 0; };

    Outcome out[10];
    const std::function<void()> jobs[10] = {
        [] {},
        [&] { corner_exactness(out[1]); },
        [&] { dual_agreement(out[2]); },
        [&] { analytic_bracket(out[3]); },
        [&] { hjb_and_smooth_fit(out[4], out[5]); },  // one verifier run serves 4 and 5
        [] {},
        [&] { degenerate_closed_form(out[6]); },
        [&] { monte_carlo(out[7]); },
        [&] { comparative_statics(out[8]); },
        [&] { policy_limits(out[9]); },
    };
    const char* names[10] = {"",
                             "corner-case exactness",
                             "dual-formulation agreement",
                             "analytic bracket",
                             "HJB residuals",
                             "smooth fit",
                             "degenerate closed form",
                             "Monte Carlo optimality",
                             "comparative statics",
                             "policy limits"};

    bool all = true;
    bool verifier_ran = false;
    for (int k = 1; k <= 9; ++k) {
        if (!want(k)) continue;
        const int job = k == 5 ? 4 : k;
        if (job != 4 || !verifier_ran) {
            try {
                jobs[job]();
            } catch (const std::exception& ex) {
                for (int i : {job, job == 4 ? 5 : job}) {
                    out[i].pass = false;
                    out[i].detail << " [exception: " << ex.what() << "]";
                }
            }
            verifier_ran = verifier_ran || job == 4;
        }
        std::printf("%s criterion %d (%s): %s\n", out[k].pass ? "PASS" : "FAIL", k, names[k], out[k].detail.str().c_str());
        std::fflush(stdout);
        all = all && out[k].pass;
    }
    return all ? 0 : 1;
}
