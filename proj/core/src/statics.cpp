#include "divopt/statics.hpp"

#include "divopt/policy.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace divopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string label(const char* prefix, double v) {
    std::ostringstream os;
    os << prefix << v;
    return os.str();
}

struct Sample {
    double theta, cbar, pi;
};

Sample sample(const PolicyEngine<double>& engine, double z) {
    return {engine.theta(z), engine.consumption_ratio(z), engine.pi_star(z, 1.0)};
}

}  // namespace

std::vector<std::string> SweepTable::column_names() const {
    std::vector<std::string> names{"qstar", "zstar"};
    for (const char* c : {"theta_q", "cbar_q", "pi_q"}) {
        for (double q : quantiles) names.push_back(label(c, q));
    }
    for (const char* c : {"theta_zmin", "cbar_zmin", "pi_zmin"}) {
        for (double f : abs_fractions) names.push_back(label(c, f));
    }
    return names;
}

std::vector<double> SweepTable::column(const std::string& name) const {
    const auto names = column_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ConfigError("unknown sweep column '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - names.begin());
    const std::size_t nq = quantiles.size();
    const std::size_t na = abs_fractions.size();
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (!r.converged) {
            out.push_back(kNaN);
            continue;
        }
        std::size_t k = idx;
        if (k == 0) { out.push_back(r.qstar); continue; }
        if (k == 1) { out.push_back(r.zstar); continue; }
        k -= 2;
        const std::vector<double>* groups[] = {&r.theta, &r.cbar, &r.pi};
        if (k < 3 * nq) { out.push_back((*groups[k / nq])[k % nq]); continue; }
        k -= 3 * nq;
        const std::vector<double>* abs_groups[] = {&r.theta_abs, &r.cbar_abs, &r.pi_abs};
        out.push_back((*abs_groups[k / na])[k % na]);
    }
    return out;
}

SweepTable sweep(const ModelParams& base, const std::string& param_name, const std::vector<double>& grid,
                 const SweepOptions& options, unsigned threads) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (double q : options.quantiles) {
        if (!(q > 0.0 && q <= 1.0)) throw ConfigError("sweep quantiles must lie in (0, 1]");
    }
    for (double f : options.abs_fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep absolute fractions must lie in (0, 1]");
    }

    std::vector<double> values = grid;
    std::sort(values.begin(), values.end());
    std::vector<ModelParams> params;
    params.reserve(values.size());
    for (double v : values) {
        ModelParams p = base.with(param_name, v);
        if (classify_regime(p) == Regime::Degenerate) {
            throw ConfigError("sweep point " + param_name + " = " + label("", v) + " is degenerate");
        }
        params.push_back(p);
    }

    SweepTable table;
    table.param_name = param_name;
    table.quantiles = options.quantiles;
    table.abs_fractions = options.abs_fractions;
    table.rows.resize(values.size());

    std::vector<std::optional<PolicyEngine<double>>> engines(values.size());
    detail::parallel_for(values.size(), threads, [&](std::size_t i) {
        SweepRow& row = table.rows[i];
        row.value = values[i];
        try {
            engines[i].emplace(solve_frontier<double>(params[i], options.solver));
            row.converged = true;
            row.qstar = engines[i]->qstar();
            row.zstar = engines[i]->zstar();
        } catch (const SolverFailure& e) {
            row.error = e.what();
        }
    });

    double zmin = std::numeric_limits<double>::infinity();
    for (const auto& r : table.rows) {
        if (r.converged) zmin = std::min(zmin, r.zstar);
    }
    for (double f : options.abs_fractions) {
        table.abs_z.push_back(std::isfinite(zmin) ? f * zmin : kNaN);
    }

    detail::parallel_for(values.size(), threads, [&](std::size_t i) {
        SweepRow& row = table.rows[i];
        if (!row.converged) return;
        const PolicyEngine<double>& e = *engines[i];
        for (double q : table.quantiles) {
            const Sample s = sample(e, q == 1.0 ? row.zstar : q * row.zstar);
            row.theta.push_back(s.theta);
            row.cbar.push_back(s.cbar);
            row.pi.push_back(s.pi);
        }
        for (double z : table.abs_z) {
            const Sample s = sample(e, std::min(z, row.zstar));
            row.theta_abs.push_back(s.theta);
            row.cbar_abs.push_back(s.cbar);
            row.pi_abs.push_back(s.pi);
        }
    });
    return table;
}

std::string_view to_string(Direction direction) {
    return direction == Direction::Increasing ? "increasing" : "decreasing";
}

Direction parse_direction(const std::string& text) {
    if (text == "increasing") return Direction::Increasing;
    if (text == "decreasing") return Direction::Decreasing;
    throw ConfigError("direction must be 'increasing' or 'decreasing', got '" + text + "'");
}

MonotonicityResult monotonicity_check(const SweepTable& table, const std::string& column, Direction direction,
                                      double slack) {
    MonotonicityResult res;
    res.column = column;
    res.direction = direction;
    const std::vector<double> v = table.column(column);
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isnan(v[i])) usable.push_back(i);
    }
    if (usable.size() < 3) {
        res.message = "fewer than three converged rows";
        return res;
    }
    const double sign = direction == Direction::Increasing ? 1.0 : -1.0;
    for (std::size_t k = 1; k < usable.size(); ++k) {
        const std::size_t i = usable[k];
        const std::size_t j = usable[k - 1];
        if (!(sign * (v[i] - v[j]) > slack)) {
            res.first_violation = i;
            std::ostringstream os;
            os.precision(12);
            os << column << " not strictly " << to_string(direction) << " at row " << i << ": " << v[j]
               << " -> " << v[i];
            res.message = os.str();
            return res;
        }
    }
    res.pass = true;
    res.message = column + " strictly " + std::string(to_string(direction));
    return res;
}

void write_sweep_csv(const SweepTable& table, std::ostream& out) {
    const auto old_prec = out.precision(12);
    const auto names = table.column_names();
    out << "value,converged";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(table.column(n));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const SweepRow& r = table.rows[i];
        out << r.value << ',' << (r.converged ? 1 : 0);
        for (const auto& c : cols) {
            out << ',';
            if (r.converged) out << c[i];
        }
        out << '\n';
    }
    out.precision(old_prec);
}

}  // namespace divopt
