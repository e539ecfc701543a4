#include "divopt/report_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <system_error>

namespace divopt {

namespace {

using nlohmann::ordered_json;

ordered_json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

ordered_json params_json(const ParamSet& p) {
    return ordered_json{{"mu", p.mu},       {"sigma", p.sigma}, {"rho", p.rho},
                        {"r", p.r},         {"beta", p.beta},   {"lambda", p.lambda}};
}

ordered_json sim_json(const SimReport& r) {
    ordered_json pol{{"kind", std::string(to_string(r.policy.kind))}, {"label", r.policy.label()}};
    if (r.policy.kind == PolicySpec::Kind::ConstantBarrier) {
        pol["barrier"] = num(r.policy.barrier);
        pol["leverage"] = num(r.policy.leverage);
        pol["consumption"] = num(r.policy.consumption);
    }
    return ordered_json{{"policy", pol},
                        {"estimate", num(r.estimate)},
                        {"stderr", num(r.stderr_)},
                        {"value_at_start", num(r.value_at_start)},
                        {"n_paths", r.n_paths},
                        {"n_valid", r.n_valid},
                        {"n_invalid", r.n_invalid},
                        {"invalid_fraction", num(r.invalid_fraction)},
                        {"dt", num(r.dt)},
                        {"horizon", num(r.horizon)},
                        {"steps", r.steps},
                        {"seed", r.seed},
                        {"deterministic", r.deterministic},
                        {"defaults_observed", 0},
                        {"diagnostics",
                         {{"min_z", num(r.min_z)},
                          {"max_z", num(r.max_z)},
                          {"max_barrier_excess", num(r.max_barrier_excess)},
                          {"max_wealth_jump", num(r.max_wealth_jump)},
                          {"mean_dividends", num(r.mean_dividends)}}}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string to_json(const FrontierSummary& s) {
    ordered_json j{{"params", params_json(s.params)},
                   {"regime", std::string(to_string(s.regime))},
                   {"precision", s.precision},
                   {"qstar", num(s.qstar)},
                   {"zstar", num(s.zstar)},
                   {"alpha", s.alpha ? num(*s.alpha) : ordered_json(nullptr)},
                   {"qstar_lower_bound", num(s.qstar_lower_bound)},
                   {"steps", s.steps}};
    if (s.qstar_b) {
        j["qstar_b"] = num(*s.qstar_b);
        j["qstar_gap"] = num(std::abs(*s.qstar_b - s.qstar));
    }
    return dump(j);
}

std::string to_json(const ResidualReport& r, bool include_nodes) {
    ordered_json j{{"regime", std::string(to_string(r.regime))},
                   {"zstar", num(r.zstar)},
                   {"grid",
                    {{"n_z", r.grid.n_z},
                     {"n_x", r.grid.n_x},
                     {"z_lo", r.grid.z_lo},
                     {"z_hi", r.grid.z_hi},
                     {"x_lo", r.grid.x_lo},
                     {"x_hi", r.grid.x_hi}}},
                   {"fd_step", num(r.fd_step)},
                   {"richardson", r.richardson},
                   {"nodes_nodiv", r.nodes_nodiv},
                   {"nodes_div", r.nodes_div},
                   {"concavity_violations", r.concavity_violations},
                   {"max_abs_L_residual_nodiv", num(r.max_abs_L_residual_nodiv)},
                   {"max_M_violation_nodiv", num(r.max_M_violation_nodiv)},
                   {"max_L_violation_div", num(r.max_L_violation_div)},
                   {"max_abs_M_residual_div", num(r.max_abs_M_residual_div)}};
    if (r.max_abs_L_residual_nodiv_half) j["max_abs_L_residual_nodiv_half"] = num(*r.max_abs_L_residual_nodiv_half);
    if (r.fd_ratio) j["fd_ratio"] = num(*r.fd_ratio);
    if (r.smooth_fit) {
        j["smooth_fit"] = {{"g_jump", num(r.smooth_fit->g_jump)},
                           {"g1_jump", num(r.smooth_fit->g1_jump)},
                           {"g2_jump", num(r.smooth_fit->g2_jump)}};
    }
    j["tolerances"] = {{"l_nodiv", r.tol.l_nodiv}, {"m_nodiv", r.tol.m_nodiv}, {"m_div", r.tol.m_div},
                       {"l_div", r.tol.l_div},     {"g_jump", r.tol.g_jump},   {"g1_jump", r.tol.g1_jump},
                       {"g2_jump", r.tol.g2_jump}, {"fd_ratio", r.tol.fd_ratio}};
    j["checks"] = {{"l_nodiv", r.pass_l_nodiv},     {"m_nodiv", r.pass_m_nodiv},
                   {"l_div", r.pass_l_div},         {"m_div", r.pass_m_div},
                   {"concavity", r.pass_concavity}, {"smooth_fit", r.pass_smooth_fit},
                   {"convergence", r.pass_convergence}};
    j["pass"] = r.pass;
    if (include_nodes) {
        ordered_json nodes = ordered_json::array();
        for (const auto& n : r.nodes) {
            nodes.push_back({{"s", n.s},
                             {"x", n.x},
                             {"region", std::string(to_string(n.region))},
                             {"L", num(n.l)},
                             {"M", num(n.m)}});
        }
        j["nodes"] = std::move(nodes);
    }
    return dump(j);
}

std::string to_json(const SimReport& report) { return dump(sim_json(report)); }

std::string tournament_json(const std::vector<SimReport>& reports) {
    ordered_json list = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json e = sim_json(r);
        if (&r != &reports.front()) {
            const PairedDifference d = paired_difference(reports.front(), r);
            e["paired_vs_first"] = {{"mean", num(d.mean)}, {"stderr", num(d.stderr_)}, {"n", d.n}};
        }
        list.push_back(std::move(e));
    }
    return dump(ordered_json{{"reports", std::move(list)}});
}

std::string sweep_verdicts_json(const SweepTable& table, const std::vector<MonotonicityResult>& verdicts) {
    ordered_json list = ordered_json::array();
    bool all = true;
    for (const auto& v : verdicts) {
        ordered_json e{{"column", v.column},
                       {"direction", std::string(to_string(v.direction))},
                       {"pass", v.pass},
                       {"message", v.message}};
        e["first_violation"] = v.first_violation ? ordered_json(*v.first_violation) : ordered_json(nullptr);
        all = all && v.pass;
        list.push_back(std::move(e));
    }
    ordered_json gap_list = ordered_json::array();
    for (const auto& r : table.rows) {
        if (!r.converged) {
            gap_list.push_back({{"value", r.value}, {"error", r.error}});
        }
    }
    return dump(ordered_json{{"param", table.param_name},
                             {"rows", table.rows.size()},
                             {"gaps", gap_list},
                             {"verdicts", std::move(list)},
                             {"pass", all}});
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw ConfigError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path.string());
    }
}

}  // namespace divopt
