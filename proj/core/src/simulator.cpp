#include "divopt/simulator.hpp"

#include "parallel.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace divopt {

PolicySpec PolicySpec::constant_barrier(double barrier, double leverage, double consumption) {
    if (!(barrier > 0.0) || !std::isfinite(barrier)) throw ConfigError("constant barrier must be > 0");
    if (!(consumption > 0.0) || !std::isfinite(consumption)) {
        throw ConfigError("constant consumption rate must be > 0");
    }
    if (!std::isfinite(leverage)) throw ConfigError("constant leverage must be finite");
    return {Kind::ConstantBarrier, barrier, leverage, consumption};
}

std::string_view to_string(PolicySpec::Kind kind) {
    switch (kind) {
        case PolicySpec::Kind::OptimalFeedback: return "optimal";
        case PolicySpec::Kind::ConstantBarrier: return "constant_barrier";
        case PolicySpec::Kind::ImmediateLiquidation: return "liquidation";
    }
    return "unknown";
}

std::string PolicySpec::label() const {
    if (kind != Kind::ConstantBarrier) return std::string(to_string(kind));
    std::ostringstream os;
    os.precision(6);
    os << "constant_barrier(z=" << barrier << ",pi=" << leverage << ",c=" << consumption << ")";
    return os.str();
}

void validate(const SimConfig& c, const ModelParams& p) {
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be > 0");
    if (!std::isfinite(c.horizon) || c.horizon * (p.beta() + p.lambda()) < 12.0) {
        throw ConfigError("horizon * (beta + lambda) must be at least 12");
    }
    if (c.dt > c.horizon) throw ConfigError("dt must not exceed the horizon");
    if (c.n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (c.coupling < 1) throw ConfigError("coupling must be >= 1");
    try {
        validate_state(State{c.s0, c.x0});
    } catch (const DomainError& e) {
        throw ConfigError(std::string("initial state: ") + e.what());
    }
    if (c.policy.kind == PolicySpec::Kind::ConstantBarrier) {
        (void)PolicySpec::constant_barrier(c.policy.barrier, c.policy.leverage, c.policy.consumption);
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t seed, std::size_t path) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5851F42D4C957F2DULL + path));
}

// Controls frozen over one step, with the per-step coefficients derived from them.
struct Controls {
    double a = 1.0;       // 1 + (rho + (mu - rho) pi) dt
    double b = 0.0;       // sigma pi
    double g = 0.0;       // (r - c-bar) dt, the log-growth of X
    double grow = 1.0;    // exp(g)
    double shrink = 1.0;  // exp(-g)
    double ln_c = 0.0;    // ln c-bar
    double pi = 0.0;
};

Controls make_controls(const ModelParams& p, double pi, double cbar, double dt) {
    Controls c;
    c.a = 1.0 + (p.rho() + (p.mu() - p.rho()) * pi) * dt;
    c.b = p.sigma() * pi;
    c.g = (p.r() - cbar) * dt;
    c.grow = std::exp(c.g);
    c.shrink = std::exp(-c.g);
    c.ln_c = std::log(cbar);
    c.pi = pi;
    return c;
}

class ConstantPolicy {
public:
    ConstantPolicy(const ModelParams& p, double barrier, double pi, double cbar, double dt)
        : barrier_(barrier), c_(make_controls(p, pi, cbar, dt)) {}
    [[nodiscard]] double barrier() const { return barrier_; }
    [[nodiscard]] const Controls& at(double) const { return c_; }
    [[nodiscard]] bool deterministic() const { return c_.pi == 0.0; }

private:
    double barrier_;
    Controls c_;
};

// Optimal controls tabulated on z = z* u^2, u uniform on [0, 1]; q(z) behaves
// like a power of z below one near 0, which is smooth in u.
class TabulatedPolicy {
public:
    static constexpr std::size_t cells = 2048;

    TabulatedPolicy(const PolicyEngine<double>& engine, double dt)
        : barrier_(engine.zstar()), inv_barrier_(1.0 / barrier_) {
        const ModelParams& p = engine.params();
        const bool corner = engine.regime() == Regime::Corner;
        std::vector<Controls> nodes(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) {
            const double u = double(i) / double(cells);
            const double q = i == cells ? engine.qstar() : engine.q_of_z(barrier_ * u * u);
            const double cbar = 1.0 / (1.0 / p.beta() - q);
            const double pi = corner ? 0.0 : p.merton_ratio() * engine.theta_of_q(q);
            nodes[i] = make_controls(p, pi, cbar, dt);
        }
        // value and slope per cell, adjacent in memory
        table_.resize(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            const Controls& l = nodes[i];
            const Controls& r = nodes[i + 1];
            table_[i].base = l;
            table_[i].slope = {r.a - l.a, r.b - l.b, r.g - l.g, r.grow - l.grow,
                               r.shrink - l.shrink, r.ln_c - l.ln_c, r.pi - l.pi};
        }
        top_ = nodes[cells];
        deterministic_ = corner;
    }

    [[nodiscard]] double barrier() const { return barrier_; }
    [[nodiscard]] bool deterministic() const { return deterministic_; }

    [[nodiscard]] Controls at(double z) const {
        const double pos = std::sqrt(std::max(z, 0.0) * inv_barrier_) * double(cells);
        if (!(pos < double(cells))) return top_;
        const std::size_t i = static_cast<std::size_t>(pos);
        const double w = pos - double(i);
        const Cell& c = table_[i];
        return {c.base.a + w * c.slope.a,       c.base.b + w * c.slope.b,
                c.base.g + w * c.slope.g,       c.base.grow + w * c.slope.grow,
                c.base.shrink + w * c.slope.shrink, c.base.ln_c + w * c.slope.ln_c,
                c.base.pi + w * c.slope.pi};
    }

private:
    struct Cell {
        Controls base;
        Controls slope;
    };
    double barrier_;
    double inv_barrier_;
    bool deterministic_ = false;
    std::vector<Cell> table_;
    Controls top_;
};

struct PathResult {
    double value = 0.0;
    bool valid = true;
    double min_z = std::numeric_limits<double>::infinity();
    double max_z = -std::numeric_limits<double>::infinity();
    double max_excess = -std::numeric_limits<double>::infinity();
    double max_wealth_jump = 0.0;
    double dividends = 0.0;
};

struct NoObserver {
    static constexpr bool active = false;
    void operator()(std::size_t, double, double, const Controls&, double) {}
};

// reward = reward_lnx ln X + ln c-bar + reward_const, discounted at delta
struct Model {
    double reward_lnx, reward_const, delta;
};

// Advances `lanes` independent paths in lockstep. The per-step update is a
// serial dependency chain, so interleaving paths lets them overlap; each
// path keeps its own generator, so results do not depend on the grouping.
template <std::size_t Lanes, class Policy, class Observer>
void run_paths(const Policy& policy, const Model& m, const SimConfig& cfg, std::size_t steps,
               std::size_t first, std::size_t lanes, PathResult* out, Observer& observe) {
    const double zbar = policy.barrier();
    const double sub_sd = std::sqrt(cfg.dt / double(cfg.coupling));
    const double edt = std::exp(-m.delta * cfg.dt);
    const double half_weight = -0.5 * std::expm1(-m.delta * cfg.dt) / m.delta;
    const double inv_one_zbar = 1.0 / (1.0 + zbar);

    double x[Lanes], z[Lanes], ln_x[Lanes], f_prev[Lanes], acc[Lanes];
    bool live[Lanes];
    Controls ctl[Lanes];
    boost::random::mt19937_64 rng[Lanes];
    boost::random::normal_distribution<double> normal[Lanes];

    for (std::size_t l = 0; l < Lanes; ++l) {
        live[l] = l < lanes;
        if (!live[l]) continue;
        PathResult& res = out[l];
        res = PathResult{};
        double paid0 = 0.0;
        x[l] = cfg.x0;
        // opening lump when the initial ratio is above the barrier (or x0 = 0)
        if (cfg.x0 == 0.0 || cfg.s0 / cfg.x0 > zbar) {
            paid0 = (cfg.s0 - zbar * cfg.x0) / (1.0 + zbar);
            x[l] = cfg.x0 + paid0;
            z[l] = zbar;
        } else {
            z[l] = cfg.s0 / cfg.x0;
        }
        ln_x[l] = std::log(x[l]);
        res.dividends = paid0;
        res.min_z = res.max_z = z[l];
        res.max_excess = z[l] - zbar;
        rng[l].seed(path_seed(cfg.seed, first + l));
        ctl[l] = policy.at(z[l]);
        if constexpr (Observer::active) observe(0, x[l], z[l], ctl[l], paid0);
        f_prev[l] = m.reward_lnx * ln_x[l] + ctl[l].ln_c;
        acc[l] = 0.0;
    }

    double disc = 1.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t l = 0; l < Lanes; ++l) {
            if (!live[l]) continue;
            PathResult& res = out[l];
            double db = normal[l](rng[l]);
            for (unsigned j = 1; j < cfg.coupling; ++j) db += normal[l](rng[l]);
            const double growth = ctl[l].a + ctl[l].b * (db * sub_sd);
            if (growth < 0.0) {
                res.valid = false;  // S < 0
                live[l] = false;
                continue;
            }
            ln_x[l] += ctl[l].g;
            x[l] *= ctl[l].grow;
            double zl = z[l] * (growth * ctl[l].shrink);
            res.min_z = std::min(res.min_z, zl);
            res.max_z = std::max(res.max_z, zl);
            double paid = 0.0;
            if (zl > zbar) {
                const double frac = (zl - zbar) * inv_one_zbar;
                const double before = x[l] * (1.0 + zl);
                paid = x[l] * frac;
                x[l] += paid;
                ln_x[l] += std::log1p(frac);
                res.max_wealth_jump =
                    std::max(res.max_wealth_jump, std::abs(x[l] * (1.0 + zbar) - before) / before);
                zl = zbar;
                res.dividends += paid;
            }
            z[l] = zl;
            res.max_excess = std::max(res.max_excess, zl - zbar);
            ctl[l] = policy.at(zl);
            if constexpr (Observer::active) observe(k, x[l], zl, ctl[l], paid);
            const double f = m.reward_lnx * ln_x[l] + ctl[l].ln_c;
            acc[l] += disc * (f_prev[l] + f);
            f_prev[l] = f;
        }
        disc *= edt;
    }
    // the constant part of the reward integrates in closed form over [0, T]
    const double horizon = double(steps) * cfg.dt;
    const double tail = -m.reward_const * std::expm1(-m.delta * horizon) / m.delta;
    for (std::size_t l = 0; l < lanes; ++l) {
        if (out[l].valid) out[l].value = half_weight * acc[l] + tail;
    }
}

struct TraceWriter {
    static constexpr bool active = true;
    std::ostream& os;
    double dt;
    std::size_t stride;
    double pending = 0.0;  // dividends between recorded rows
    void operator()(std::size_t k, double x, double z, const Controls& c, double paid) {
        pending += paid;
        if (k % stride != 0) return;
        os << double(k) * dt << ',' << z * x << ',' << x << ',' << z << ',' << c.pi << ','
           << std::exp(c.ln_c) * x << ',' << pending << '\n';
        pending = 0.0;
    }
};

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

Model make_model(const ModelParams& p) {
    Model m;
    m.reward_lnx = 1.0 + p.lambda() / p.beta();
    m.reward_const = p.lambda() * post_default_constant<double>(p);
    m.delta = p.beta() + p.lambda();
    return m;
}

std::size_t step_count(const SimConfig& c) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c.horizon / c.dt - 1e-9)));
}

template <class Fn>
auto with_policy(const SimConfig& cfg, const PolicyEngine<double>& engine, Fn&& fn) {
    const ModelParams& p = engine.params();
    switch (cfg.policy.kind) {
        case PolicySpec::Kind::OptimalFeedback: {
            if (engine.regime() == Regime::Degenerate) {
                throw UnsupportedRegime("optimal feedback needs a frontier; use liquidation in the degenerate regime");
            }
            return fn(TabulatedPolicy(engine, cfg.dt));
        }
        case PolicySpec::Kind::ConstantBarrier:
            return fn(ConstantPolicy(p, cfg.policy.barrier, cfg.policy.leverage, cfg.policy.consumption, cfg.dt));
        case PolicySpec::Kind::ImmediateLiquidation:
            break;
    }
    return fn(ConstantPolicy(p, 0.0, 0.0, p.beta(), cfg.dt));
}

}  // namespace

SimReport simulate(const SimConfig& cfg, const PolicyEngine<double>& engine, unsigned threads) {
    const ModelParams& p = engine.params();
    validate(cfg, p);
    const Model model = make_model(p);
    const std::size_t steps = step_count(cfg);

    SimReport rep;
    rep.policy = cfg.policy;
    rep.n_paths = cfg.n_paths;
    rep.dt = cfg.dt;
    rep.horizon = cfg.horizon;
    rep.steps = steps;
    rep.seed = cfg.seed;
    rep.value_at_start = engine.value(cfg.s0, cfg.x0).v;

    std::vector<PathResult> results = with_policy(cfg, engine, [&](const auto& policy) {
        rep.deterministic = policy.deterministic();
        const std::size_t distinct = rep.deterministic ? 1 : cfg.n_paths;
        std::vector<PathResult> out(distinct);
        // blocks of paths keep the per-task overhead small
        constexpr std::size_t lanes = 4;
        const std::size_t block = 64;
        const std::size_t blocks = (distinct + block - 1) / block;
        detail::parallel_for(blocks, threads, [&](std::size_t b) {
            NoObserver none;
            const std::size_t end = std::min(distinct, (b + 1) * block);
            for (std::size_t i = b * block; i < end; i += lanes) {
                run_paths<lanes>(policy, model, cfg, steps, i, std::min(lanes, end - i), &out[i], none);
            }
        });
        return out;
    });

    rep.path_values.assign(cfg.n_paths, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> valid;
    valid.reserve(cfg.n_paths);
    double dividends = 0.0;
    rep.min_z = std::numeric_limits<double>::infinity();
    rep.max_z = -std::numeric_limits<double>::infinity();
    rep.max_barrier_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        const PathResult& r = results[rep.deterministic ? 0 : i];
        rep.min_z = std::min(rep.min_z, r.min_z);
        rep.max_z = std::max(rep.max_z, r.max_z);
        if (!r.valid) {
            ++rep.n_invalid;
            continue;
        }
        rep.max_barrier_excess = std::max(rep.max_barrier_excess, r.max_excess);
        rep.max_wealth_jump = std::max(rep.max_wealth_jump, r.max_wealth_jump);
        rep.path_values[i] = r.value;
        valid.push_back(r.value);
        dividends += r.dividends;
    }
    rep.n_valid = valid.size();
    rep.invalid_fraction = double(rep.n_invalid) / double(cfg.n_paths);
    if (rep.n_valid == 0) {
        rep.estimate = std::numeric_limits<double>::quiet_NaN();
        rep.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    const double n = double(rep.n_valid);
    rep.estimate = pairwise_sum(valid.data(), valid.size()) / n;
    rep.mean_dividends = dividends / n;
    if (rep.deterministic || rep.n_valid < 2) {
        rep.stderr_ = 0.0;
    } else {
        for (double& v : valid) v = (v - rep.estimate) * (v - rep.estimate);
        const double var = pairwise_sum(valid.data(), valid.size()) / (n - 1.0);
        rep.stderr_ = std::sqrt(var / n);
    }
    return rep;
}

std::vector<SimReport> policy_tournament(const std::vector<SimConfig>& configs, const PolicyEngine<double>& engine,
                                         unsigned threads) {
    if (configs.empty()) throw ConfigError("tournament needs at least one policy");
    const SimConfig& ref = configs.front();
    for (const SimConfig& c : configs) {
        if (c.s0 != ref.s0 || c.x0 != ref.x0 || c.seed != ref.seed || c.n_paths != ref.n_paths || c.dt != ref.dt ||
            c.horizon != ref.horizon || c.coupling != ref.coupling) {
            throw ConfigError("tournament entries must share s0, x0, seed, n_paths, dt, horizon and coupling");
        }
    }
    std::vector<SimReport> out;
    out.reserve(configs.size());
    for (const SimConfig& c : configs) out.push_back(simulate(c, engine, threads));
    std::stable_sort(out.begin(), out.end(),
                     [](const SimReport& a, const SimReport& b) { return a.estimate > b.estimate; });
    return out;
}

PairedDifference paired_difference(const SimReport& a, const SimReport& b) {
    if (a.path_values.size() != b.path_values.size() || a.seed != b.seed) {
        throw ConfigError("paired difference needs runs with common random numbers");
    }
    std::vector<double> d;
    d.reserve(a.path_values.size());
    for (std::size_t i = 0; i < a.path_values.size(); ++i) {
        const double da = a.path_values[i];
        const double dbv = b.path_values[i];
        if (std::isnan(da) || std::isnan(dbv)) continue;
        d.push_back(da - dbv);
    }
    PairedDifference out;
    out.n = d.size();
    if (d.empty()) {
        out.mean = out.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double n = double(d.size());
    out.mean = pairwise_sum(d.data(), d.size()) / n;
    if (d.size() > 1) {
        for (double& v : d) v = (v - out.mean) * (v - out.mean);
        out.stderr_ = std::sqrt(pairwise_sum(d.data(), d.size()) / (n - 1.0) / n);
    }
    return out;
}

std::vector<PolicySpec> standard_perturbations(const PolicyEngine<double>& engine) {
    const double zs = engine.zstar();
    const double pis = engine.regime() == Regime::Corner
                           ? 0.0
                           : engine.params().merton_ratio() * engine.theta_of_q(engine.qstar());
    const double cs = engine.consumption_ratio(zs);
    return {
        PolicySpec::constant_barrier(0.5 * zs, pis, cs),
        PolicySpec::constant_barrier(2.0 * zs, pis, cs),
        PolicySpec::constant_barrier(zs, 0.5 * pis, cs),
        PolicySpec::constant_barrier(zs, 2.0 * pis, cs),
    };
}

void write_trace_csv(const SimConfig& cfg, const PolicyEngine<double>& engine, std::ostream& out,
                     std::size_t path, std::size_t stride) {
    validate(cfg, engine.params());
    if (stride < 1) throw ConfigError("trace stride must be >= 1");
    const Model model = make_model(engine.params());
    const std::size_t steps = step_count(cfg);
    const auto old_prec = out.precision(12);
    out << "t,S,X,Z,pi,c,dividend_paid\n";
    TraceWriter w{out, cfg.dt, stride};
    with_policy(cfg, engine, [&](const auto& policy) {
        PathResult res;
        run_paths<1>(policy, model, cfg, steps, path, 1, &res, w);
        return 0;
    });
    out.precision(old_prec);
}

}  // namespace divopt
