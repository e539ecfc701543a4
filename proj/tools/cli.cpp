#include "cli.hpp"

#include "divopt/frontier.hpp"
#include "divopt/hjb_verifier.hpp"
#include "divopt/market_model.hpp"
#include "divopt/policy.hpp"
#include "divopt/report_io.hpp"
#include "divopt/simulator.hpp"
#include "divopt/statics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace divopt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* const kModelKeys[] = {"mu", "sigma", "rho", "r", "beta", "lambda"};
const char* const kSweepParams[] = {"lambda", "r", "sigma", "mu"};

ordered_json defaults() {
    return ordered_json::parse(R"({
  "model": {},
  "solve": {"precision": "double", "q_tol": 1e-9, "rtol": 1e-12, "atol": 1e-14,
            "series_epsilon": 1e-6, "contact_floor": 1e-14, "dual": false, "curve": false},
  "batch": {"states": ""},
  "verify": {"precision": "extended", "n_z": 64, "n_x": 64, "z_lo": 1e-3, "z_hi": 10.0,
             "x_lo": 0.5, "x_hi": 2.0, "fd_step": 1e-4, "richardson": false,
             "check_convergence": true, "nodes_csv": false,
             "tolerances": {"l_nodiv": 5e-4, "m_nodiv": 1e-6, "m_div": 1e-8, "l_div": 1e-6,
                            "g_jump": 1e-8, "g1_jump": 1e-6, "g2_jump": 1e-4, "fd_ratio": 3.0}},
  "simulate": {"s0": 1.0, "x0": 2.0, "dt": 1e-3, "horizon": 100.0, "n_paths": 10000,
               "seed": 20240601, "coupling": 1,
               "policy": {"kind": "optimal", "barrier": 0.0, "leverage": 0.0, "consumption": 0.0},
               "tournament": false, "trace": false, "trace_stride": 100},
  "sweep": {"param": "lambda", "grid": [], "checks": []},
  "output": {"dir": ".", "format": "csv"},
  "threads": 1
})");
}

std::string type_name(const ordered_json& j) {
    if (j.is_number()) return "number";
    return j.type_name();
}

bool is_integral(const ordered_json& j) { return j.is_number_integer() || j.is_number_unsigned(); }

bool same_kind(const ordered_json& want, const ordered_json& got) {
    if (is_integral(want)) {
        return is_integral(got) || (got.is_number_float() && std::floor(got.get<double>()) == got.get<double>());
    }
    if (want.is_number()) return got.is_number();
    return want.type() == got.type();
}

/// Overlays `src` onto `dst`, rejecting keys absent from `dst` and type changes.
void overlay(ordered_json& dst, const ordered_json& src, const std::string& where) {
    if (!src.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, value] : src.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (where == "model") {
            const bool known = std::find_if(std::begin(kModelKeys), std::end(kModelKeys),
                                            [&](const char* k) { return key == k; }) != std::end(kModelKeys);
            if (!known) throw ConfigError("unknown key '" + path + "'");
            if (!value.is_number()) throw ConfigError("'" + path + "' must be a number");
            dst[key] = value;
            continue;
        }
        if (!dst.contains(key)) throw ConfigError("unknown key '" + path + "'");
        ordered_json& slot = dst[key];
        if (slot.is_object()) {
            overlay(slot, value, path);
        } else if (!same_kind(slot, value)) {
            throw ConfigError("'" + path + "' must be a " + type_name(slot) + ", got " + type_name(value));
        } else if (is_integral(slot)) {
            // every integer setting is a count, a seed or a thread number
            if (value.get<double>() < 0.0) throw ConfigError("'" + path + "' must be non-negative");
            slot = value.is_number_float() ? ordered_json(static_cast<std::uint64_t>(value.get<double>())) : value;
        } else {
            slot = value;
        }
    }
}

struct Flags {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned long long> seed;
    std::optional<unsigned> threads;
    bool print_config = false;
    std::optional<double> model[6];
    std::optional<std::string> precision;
    std::optional<std::string> states;
    std::optional<std::string> format;
    bool curve = false;
    bool dual = false;
    bool nodes_csv = false;
    std::optional<std::size_t> n_paths;
    std::optional<double> dt, horizon, s0, x0;
    std::optional<std::string> policy;
    std::optional<double> barrier, leverage, consumption;
    bool tournament = false;
    bool trace = false;
    std::optional<std::string> param;
    std::vector<double> grid;
};

ordered_json resolve(const Flags& f, const std::string& command) {
    ordered_json cfg = defaults();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot read config file " + f.config_path);
        ordered_json file;
        try {
            file = ordered_json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config file " + f.config_path + " is not valid JSON: " + e.what());
        }
        overlay(cfg, file, "");
    }
    for (std::size_t i = 0; i < 6; ++i) {
        if (f.model[i]) cfg["model"][kModelKeys[i]] = *f.model[i];
    }
    if (f.out_dir) cfg["output"]["dir"] = *f.out_dir;
    if (f.format) cfg["output"]["format"] = *f.format;
    if (f.seed) cfg["simulate"]["seed"] = *f.seed;
    if (f.threads) cfg["threads"] = *f.threads;
    if (f.precision) cfg[command == "verify" ? "verify" : "solve"]["precision"] = *f.precision;
    if (f.states) cfg["batch"]["states"] = *f.states;
    if (f.curve) cfg["solve"]["curve"] = true;
    if (f.dual) cfg["solve"]["dual"] = true;
    if (f.nodes_csv) cfg["verify"]["nodes_csv"] = true;
    auto& sim = cfg["simulate"];
    if (f.n_paths) sim["n_paths"] = *f.n_paths;
    if (f.dt) sim["dt"] = *f.dt;
    if (f.horizon) sim["horizon"] = *f.horizon;
    if (f.s0) sim["s0"] = *f.s0;
    if (f.x0) sim["x0"] = *f.x0;
    if (f.policy) sim["policy"]["kind"] = *f.policy;
    if (f.barrier) sim["policy"]["barrier"] = *f.barrier;
    if (f.leverage) sim["policy"]["leverage"] = *f.leverage;
    if (f.consumption) sim["policy"]["consumption"] = *f.consumption;
    if (f.tournament) sim["tournament"] = true;
    if (f.trace) sim["trace"] = true;
    if (f.param) cfg["sweep"]["param"] = *f.param;
    if (!f.grid.empty()) cfg["sweep"]["grid"] = f.grid;
    return cfg;
}

ModelParams model_of(const ordered_json& cfg) {
    std::vector<std::string> missing;
    for (const char* k : kModelKeys) {
        if (!cfg["model"].contains(k)) missing.emplace_back(std::string("model.") + k);
    }
    if (!missing.empty()) {
        std::string msg = "missing required key";
        msg += missing.size() > 1 ? "s " : " ";
        for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
        throw ConfigError(msg);
    }
    const auto& m = cfg["model"];
    return ModelParams(ParamSet{m["mu"].get<double>(), m["sigma"].get<double>(), m["rho"].get<double>(),
                                m["r"].get<double>(), m["beta"].get<double>(), m["lambda"].get<double>()});
}

bool extended_precision(const ordered_json& block, const char* where) {
    const std::string p = block["precision"].get<std::string>();
    if (p == "double") return false;
    if (p == "extended") return true;
    throw ConfigError(std::string(where) + ".precision must be 'double' or 'extended', got '" + p + "'");
}

SolverOptions solver_options(const ordered_json& cfg, bool extended) {
    SolverOptions o = extended ? SolverOptions::extended() : SolverOptions{};
    if (extended) return o;
    const auto& s = cfg["solve"];
    o.q_tol = s["q_tol"].get<double>();
    o.rtol = s["rtol"].get<double>();
    o.atol = s["atol"].get<double>();
    o.series_epsilon = s["series_epsilon"].get<double>();
    o.contact_floor = s["contact_floor"].get<double>();
    return o;
}

struct Context {
    ordered_json cfg;
    ModelParams params;
    fs::path dir;
    std::string format;
    unsigned threads;
    std::ostream& out;
    std::ostream& err;

    void write(const std::string& name, const std::string& content) const {
        const fs::path p = dir / name;
        write_file_atomic(p, content);
        err << "divopt: wrote " << p.string() << '\n';
    }
};

template <class Real>
FrontierSummary summarize(const ModelParams& params, const SolverOptions& opts, const char* precision,
                          std::optional<FrontierSolution<Real>>& keep) {
    FrontierSummary s;
    s.params = params.values();
    s.regime = classify_regime(params);
    s.precision = precision;
    s.qstar_lower_bound = qstar_lower_bound(params);
    if (s.regime == Regime::Degenerate) return s;
    keep.emplace(solve_frontier<Real>(params, opts));
    s.qstar = to_double(keep->qstar());
    s.zstar = to_double(keep->zstar());
    s.alpha = to_double(keep->series().alpha);
    s.steps = keep->step_count();
    return s;
}

int cmd_solve(const Context& c) {
    const auto& sb = c.cfg["solve"];
    const bool ext = extended_precision(sb, "solve");
    const SolverOptions opts = solver_options(c.cfg, ext);
    FrontierSummary s;
    std::optional<FrontierSolution<double>> sol;
    if (ext) {
        std::optional<FrontierSolution<Quad>> q;
        s = summarize<Quad>(c.params, opts, "extended", q);
        if (sb["curve"].get<bool>() && s.regime != Regime::Degenerate) {
            sol.emplace(solve_frontier<double>(c.params, solver_options(c.cfg, false)));
        }
    } else {
        s = summarize<double>(c.params, opts, "double", sol);
    }
    if (sb["dual"].get<bool>() && s.regime == Regime::General) {
        s.qstar_b = solve_frontier_b(c.params, solver_options(c.cfg, false));
    }
    const std::string json = to_json(s);
    c.out << json;
    c.write("solve.json", json);
    if (sb["curve"].get<bool>()) {
        if (!sol) throw UnsupportedRegime("no frontier curve in the degenerate regime");
        std::ostringstream os;
        write_curve_csv(*sol, os);
        c.write("curve.csv", os.str());
    }
    return kExitOk;
}

std::vector<State> load_states(const Context& c) {
    const std::string path = c.cfg["batch"]["states"].get<std::string>();
    if (path.empty()) throw ConfigError("missing required key batch.states (or --states)");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read states file " + path);
    return read_states_csv(in);
}

void check_format(const Context& c) {
    if (c.format != "csv" && c.format != "json") {
        throw ConfigError("output.format must be 'csv' or 'json', got '" + c.format + "'");
    }
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

int cmd_value(const Context& c) {
    check_format(c);
    const auto states = load_states(c);
    const PolicyEngine<double> engine(c.params);
    std::ostringstream os;
    ordered_json arr = ordered_json::array();
    os.precision(12);
    os << "s,x,z,region,V,q,V_s,V_x,V_ss\n";
    for (const State& st : states) {
        const ValueBreakdown<double> v = engine.value(st.s, st.x);
        if (c.format == "csv") {
            os << st.s << ',' << st.x << ',' << v.z << ',' << to_string(v.region) << ',' << v.v << ',' << v.q << ','
               << v.v_s << ',' << v.v_x << ',' << v.v_ss << '\n';
        } else {
            arr.push_back({{"s", st.s}, {"x", st.x}, {"z", num(v.z)}, {"region", std::string(to_string(v.region))},
                           {"V", num(v.v)}, {"q", num(v.q)}, {"V_s", num(v.v_s)}, {"V_x", num(v.v_x)},
                           {"V_ss", num(v.v_ss)}});
        }
    }
    c.write(c.format == "csv" ? "value.csv" : "value.json", c.format == "csv" ? os.str() : arr.dump(2) + "\n");
    c.out << "value: " << states.size() << " states\n";
    return kExitOk;
}

int cmd_policy(const Context& c) {
    check_format(c);
    const auto states = load_states(c);
    const PolicyEngine<double> engine(c.params);
    const auto rows = evaluate_batch(engine, states);
    if (c.format == "csv") {
        std::ostringstream os;
        write_batch_csv(rows, os);
        c.write("policy.csv", os.str());
    } else {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            arr.push_back({{"s", r.state.s}, {"x", r.state.x}, {"z", num(r.z)},
                           {"region", std::string(to_string(r.region))}, {"V", num(r.v)},
                           {"pi_star", num(r.pi_star)}, {"c_star", num(r.c_star)}, {"dividend", num(r.dividend)}});
        }
        c.write("policy.json", arr.dump(2) + "\n");
    }
    c.out << "policy: " << states.size() << " states\n";
    return kExitOk;
}

template <class Real>
ResidualReport run_verify(const Context& c, const VerifyConfig& vc, bool extended) {
    const PolicyEngine<Real> engine(c.params, solver_options(c.cfg, extended));
    return verify(engine, vc, c.threads);
}

int cmd_verify(const Context& c) {
    const auto& v = c.cfg["verify"];
    const bool ext = extended_precision(v, "verify");
    VerifyConfig vc;
    vc.grid.n_z = v["n_z"].get<std::size_t>();
    vc.grid.n_x = v["n_x"].get<std::size_t>();
    vc.grid.z_lo = v["z_lo"].get<double>();
    vc.grid.z_hi = v["z_hi"].get<double>();
    vc.grid.x_lo = v["x_lo"].get<double>();
    vc.grid.x_hi = v["x_hi"].get<double>();
    vc.fd_step = v["fd_step"].get<double>();
    vc.richardson = v["richardson"].get<bool>();
    vc.check_convergence = v["check_convergence"].get<bool>();
    const auto& t = v["tolerances"];
    vc.tol = VerifyTolerances{t["l_nodiv"].get<double>(), t["m_nodiv"].get<double>(), t["m_div"].get<double>(),
                              t["l_div"].get<double>(),   t["g_jump"].get<double>(),  t["g1_jump"].get<double>(),
                              t["g2_jump"].get<double>(), t["fd_ratio"].get<double>()};
    if (!(vc.fd_step > 0.0 && vc.fd_step < 0.5)) throw ConfigError("verify.fd_step must lie in (0, 0.5)");
    const ResidualReport rep = ext ? run_verify<Quad>(c, vc, true) : run_verify<double>(c, vc, false);
    const std::string json = to_json(rep);
    c.out << json;
    c.write("verify.json", json);
    if (v["nodes_csv"].get<bool>()) {
        std::ostringstream os;
        write_node_csv(rep, os);
        c.write("verify_nodes.csv", os.str());
    }
    return rep.pass ? kExitOk : kExitCheckFailed;
}

PolicySpec policy_of(const ordered_json& p) {
    const std::string kind = p["kind"].get<std::string>();
    if (kind == "optimal") return PolicySpec::optimal();
    if (kind == "liquidation") return PolicySpec::liquidation();
    if (kind == "constant_barrier") {
        return PolicySpec::constant_barrier(p["barrier"].get<double>(), p["leverage"].get<double>(),
                                            p["consumption"].get<double>());
    }
    throw ConfigError("simulate.policy.kind must be optimal, constant_barrier or liquidation, got '" + kind + "'");
}

int cmd_simulate(const Context& c) {
    const auto& s = c.cfg["simulate"];
    SimConfig sc;
    sc.s0 = s["s0"].get<double>();
    sc.x0 = s["x0"].get<double>();
    sc.dt = s["dt"].get<double>();
    sc.horizon = s["horizon"].get<double>();
    sc.n_paths = s["n_paths"].get<std::size_t>();
    sc.seed = s["seed"].get<std::uint64_t>();
    if (s["coupling"].get<std::uint64_t>() < 1) throw ConfigError("simulate.coupling must be at least 1");
    sc.coupling = s["coupling"].get<unsigned>();
    sc.policy = policy_of(s["policy"]);
    validate(sc, c.params);

    const PolicyEngine<double> engine(c.params);
    if (s["tournament"].get<bool>()) {
        std::vector<SimConfig> configs;
        const auto add = [&](const PolicySpec& p) {
            SimConfig k = sc;
            k.policy = p;
            configs.push_back(k);
        };
        if (engine.regime() != Regime::Degenerate) {
            add(PolicySpec::optimal());
            for (const auto& p : standard_perturbations(engine)) add(p);
        }
        add(PolicySpec::liquidation());
        if (sc.policy.kind == PolicySpec::Kind::ConstantBarrier) add(sc.policy);
        const auto reports = policy_tournament(configs, engine, c.threads);
        const std::string json = tournament_json(reports);
        c.out << json;
        c.write("tournament.json", json);
    } else {
        const SimReport rep = simulate(sc, engine, c.threads);
        const std::string json = to_json(rep);
        c.out << json;
        c.write("simulate.json", json);
    }
    if (s["trace"].get<bool>()) {
        const auto stride = s["trace_stride"].get<std::uint64_t>();
        if (stride < 1) throw ConfigError("simulate.trace_stride must be at least 1");
        std::ostringstream os;
        write_trace_csv(sc, engine, os, 0, static_cast<std::size_t>(stride));
        c.write("trace.csv", os.str());
    }
    return kExitOk;
}

struct DefaultSweep {
    std::vector<double> grid;
    std::vector<std::pair<std::string, Direction>> checks;
};

DefaultSweep default_sweep(const std::string& param, const SweepTable* table) {
    DefaultSweep d;
    if (param == "lambda") {
        for (int i = 1; i <= 15; ++i) d.grid.push_back(0.01 * i);
    } else if (param == "r") {
        d.grid = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    } else if (param == "sigma") {
        d.grid = {0.2, 0.25, 0.3, 0.35, 0.4, 0.5};
    } else {
        d.grid = {0.12, 0.15, 0.2, 0.25, 0.3};
    }
    const Direction zdir = param == "mu" ? Direction::Increasing : Direction::Decreasing;
    d.checks.emplace_back("zstar", zdir);
    if (param == "lambda" && table) {
        for (const auto& name : table->column_names()) {
            if (name.rfind("pi_zmin", 0) == 0) d.checks.emplace_back(name, Direction::Increasing);
            if (name.rfind("cbar_", 0) == 0) d.checks.emplace_back(name, Direction::Decreasing);
        }
    }
    return d;
}

int cmd_sweep(const Context& c) {
    const auto& s = c.cfg["sweep"];
    const std::string param = s["param"].get<std::string>();
    if (std::none_of(std::begin(kSweepParams), std::end(kSweepParams), [&](const char* p) { return param == p; })) {
        throw ConfigError("sweep.param must be one of lambda, r, sigma, mu, got '" + param + "'");
    }
    std::vector<double> grid;
    for (const auto& v : s["grid"]) {
        if (!v.is_number()) throw ConfigError("sweep.grid must hold numbers");
        grid.push_back(v.get<double>());
    }
    if (grid.empty()) grid = default_sweep(param, nullptr).grid;

    SweepOptions opts;
    opts.solver = solver_options(c.cfg, false);
    const SweepTable table = sweep(c.params, param, grid, opts, c.threads);

    std::vector<std::pair<std::string, Direction>> checks;
    for (const auto& chk : s["checks"]) {
        if (!chk.is_object() || chk.size() != 2 || !chk.contains("column") || !chk.contains("direction") ||
            !chk["column"].is_string() || !chk["direction"].is_string()) {
            throw ConfigError("sweep.checks entries must be {\"column\": ..., \"direction\": ...}");
        }
        checks.emplace_back(chk["column"].get<std::string>(), parse_direction(chk["direction"].get<std::string>()));
    }
    if (checks.empty()) checks = default_sweep(param, &table).checks;

    std::vector<MonotonicityResult> verdicts;
    for (const auto& [col, dir] : checks) verdicts.push_back(monotonicity_check(table, col, dir));

    std::ostringstream csv;
    write_sweep_csv(table, csv);
    c.write("sweep_" + param + ".csv", csv.str());
    const std::string json = sweep_verdicts_json(table, verdicts);
    c.write("sweep_" + param + "_verdicts.json", json);
    c.out << json;
    const bool pass = std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
    return pass ? kExitOk : kExitCheckFailed;
}

void add_model_flags(CLI::App& app, Flags& f) {
    for (std::size_t i = 0; i < 6; ++i) {
        app.add_option(std::string("--") + kModelKeys[i], f.model[i], std::string("model.") + kModelKeys[i]);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dividend, leverage and consumption under default risk"};
    app.name("divopt");
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config_path, "JSON run configuration");
    app.add_option("--out", f.out_dir, "output directory");
    app.add_option("--seed", f.seed, "simulation seed");
    app.add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--print-config", f.print_config, "print the resolved configuration and exit");
    add_model_flags(app, f);

    auto* solve = app.add_subcommand("solve", "locate the dividend barrier");
    solve->add_option("--precision", f.precision, "double or extended");
    solve->add_flag("--curve", f.curve, "write the frontier curve as CSV");
    solve->add_flag("--dual", f.dual, "also solve the dual ODE and report the gap");

    auto* value = app.add_subcommand("value", "value function on a batch of states");
    auto* policy = app.add_subcommand("policy", "optimal controls on a batch of states");
    for (auto* sub : {value, policy}) {
        sub->add_option("--states", f.states, "CSV with header s,x");
        sub->add_option("--format", f.format, "csv or json");
    }

    auto* ver = app.add_subcommand("verify", "finite-difference HJB certificate");
    ver->add_option("--precision", f.precision, "double or extended");
    ver->add_flag("--nodes-csv", f.nodes_csv, "write per-node residuals");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
    sim->add_option("--n-paths", f.n_paths);
    sim->add_option("--dt", f.dt);
    sim->add_option("--horizon", f.horizon);
    sim->add_option("--s0", f.s0);
    sim->add_option("--x0", f.x0);
    sim->add_option("--policy", f.policy, "optimal, constant_barrier or liquidation");
    sim->add_option("--barrier", f.barrier);
    sim->add_option("--leverage", f.leverage);
    sim->add_option("--consumption", f.consumption);
    sim->add_flag("--tournament", f.tournament, "rank the optimal policy against perturbations");
    sim->add_flag("--trace", f.trace, "write one sample path as CSV");

    auto* sw = app.add_subcommand("sweep", "comparative statics");
    sw->add_option("--param", f.param, "lambda, r, sigma or mu");
    sw->add_option("--grid", f.grid, "parameter values")->delimiter(',');

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        ordered_json cfg = resolve(f, command);
        if (f.print_config) {
            out << cfg.dump(2) << '\n';
            return kExitOk;
        }
        const ModelParams params = model_of(cfg);
        const auto threads = cfg["threads"].get<std::uint64_t>();
        if (threads < 1) throw ConfigError("threads must be at least 1");
        Context c{cfg,
                  params,
                  fs::path(cfg["output"]["dir"].get<std::string>()),
                  cfg["output"]["format"].get<std::string>(),
                  static_cast<unsigned>(threads),
                  out,
                  err};
        err << "divopt: " << command << " regime=" << to_string(classify_regime(params)) << '\n';
        if (command == "solve") return cmd_solve(c);
        if (command == "value") return cmd_value(c);
        if (command == "policy") return cmd_policy(c);
        if (command == "verify") return cmd_verify(c);
        if (command == "simulate") return cmd_simulate(c);
        return cmd_sweep(c);
    } catch (const ConfigError& e) {
        err << "divopt: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "divopt: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnsupportedRegime& e) {
        err << "divopt: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "divopt: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "divopt: solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
}

}  // namespace divopt::cli
