#include "divopt/policy.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace divopt {

std::string_view to_string(Region region) {
    switch (region) {
        case Region::NoDividend: return "no_dividend";
        case Region::DividendPay: return "dividend";
        case Region::BoundaryS0: return "boundary_s0";
        case Region::BoundaryX0: return "boundary_x0";
    }
    return "unknown";
}

namespace {

template <class Real>
Real nan_of() {
    return std::numeric_limits<Real>::quiet_NaN();
}

template <class Real>
Real inf_of() {
    return std::numeric_limits<Real>::infinity();
}

template <class Real>
void check_state(const Real& s, const Real& x) {
    if (!is_finite(s) || !is_finite(x)) throw DomainError("state must be finite");
    if (s < Real(0) || x < Real(0)) throw DomainError("state must be non-negative");
    if (s == Real(0) && x == Real(0)) throw DomainError("state (0, 0) is not admissible");
}

}  // namespace

template <class Real>
PolicyEngine<Real>::PolicyEngine(const ModelParams& params, const SolverOptions& options)
    : params_(params), regime_(classify_regime(params)) {
    if (regime_ != Regime::Degenerate) frontier_.emplace(solve_frontier<Real>(params, options));
}

template <class Real>
PolicyEngine<Real>::PolicyEngine(FrontierSolution<Real> frontier)
    : params_(frontier.params()), regime_(frontier.regime()), frontier_(std::move(frontier)) {}

template <class Real>
const FrontierSolution<Real>& PolicyEngine<Real>::frontier() const {
    if (!frontier_) throw UnsupportedRegime("no frontier in the degenerate regime");
    return *frontier_;
}

template <class Real>
Real PolicyEngine<Real>::zstar() const {
    return frontier_ ? frontier_->zstar() : Real(0);
}

template <class Real>
Real PolicyEngine<Real>::qstar() const {
    return frontier_ ? frontier_->qstar() : Real(0);
}

template <class Real>
Real PolicyEngine<Real>::z_of_q(Real q) const {
    using std::exp;
    const auto& f = frontier();
    if (!(q >= Real(0)) || !(q <= f.qstar())) throw DomainError("z_of_q: q must lie in [0, q*]");
    if (q == Real(0)) return Real(0);
    if (q == f.qstar()) return f.zstar();
    return exp(f.log_z(q));
}

template <class Real>
Real PolicyEngine<Real>::q_of_z(Real z) const {
    using std::abs;
    using std::exp;
    using std::log;
    const auto& f = frontier();
    if (!(z >= Real(0)) || !(z <= f.zstar())) throw DomainError("q_of_z: z must lie in [0, z*]");
    if (z == Real(0)) return Real(0);
    if (z == f.zstar()) return f.qstar();

    // ln z(q) is increasing in u = ln q with slope N'(q) >= 1, and
    // z <= beta q/(1 - beta q) bounds q from below.
    const Real beta = params_.beta();
    const Real target = log(z);
    Real lo = log(z / (beta * (Real(1) + z)));
    Real hi = log(f.qstar());
    if (lo > hi) lo = hi;
    Real u = hi + (target - log(f.zstar()));  // slope-one guess from the top
    if (!(u > lo && u < hi)) u = (lo + hi) / Real(2);
    const Real eps = machine_eps<Real>();
    for (int it = 0; it < 200; ++it) {
        const Real q = exp(u);
        const Real g = f.log_z(q) - target;
        if (g == Real(0)) return q;
        if (g > Real(0)) hi = u;
        else lo = u;
        const Real step = g / f.big_dn(q);
        Real next = u - step;
        if (!(next > lo && next < hi)) next = (lo + hi) / Real(2);
        if (abs(next - u) <= Real(4) * eps * (Real(1) + abs(u)) || hi - lo <= Real(4) * eps * (Real(1) + abs(u))) {
            return exp(next);
        }
        u = next;
    }
    return exp(u);
}

template <class Real>
Real PolicyEngine<Real>::interior_constant() const {
    using std::log;
    const Real beta = params_.beta();
    const Real lambda = params_.lambda();
    const Real r = params_.r();
    return ((lambda / beta) * (r / beta + log(beta) - Real(1)) + r / beta - Real(1)) / (beta + lambda);
}

template <class Real>
Real PolicyEngine<Real>::dividend_constant() const {
    using std::log;
    const auto& f = frontier();
    const Real beta = params_.beta();
    const Real r = params_.r();
    const Real n_star = f.n(f.qstar());
    return (n_star + r / beta + log(beta) - Real(1) - eval_ell<Real>(Real(0), params_)) / beta;
}

template <class Real>
ValueBreakdown<Real> PolicyEngine<Real>::value(Real s, Real x) const {
    using std::log;
    check_state(s, x);
    const Real beta = params_.beta();
    ValueBreakdown<Real> out;
    out.z = x > Real(0) ? s / x : inf_of<Real>();

    if (regime_ == Regime::Degenerate) {
        const Real w = s + x;
        out.v = post_default_value<Real>(w, params_);
        out.region = s == Real(0) ? Region::BoundaryS0
                     : x == Real(0) ? Region::BoundaryX0
                                    : Region::DividendPay;
        out.q = nan_of<Real>();
        out.v_s = out.v_x = Real(1) / (beta * w);
        out.v_ss = -Real(1) / (beta * w * w);
        return out;
    }

    const auto& f = *frontier_;
    if (s == Real(0)) {
        out.v = post_default_value<Real>(x, params_);
        out.region = Region::BoundaryS0;
        out.q = Real(0);
        out.v_s = nan_of<Real>();
        out.v_x = Real(1) / (beta * x);
        out.v_ss = nan_of<Real>();
        return out;
    }
    if (x == Real(0) || out.z > f.zstar()) {
        const Real w = s + x;
        out.v = log(w) / beta + dividend_constant();
        out.region = x == Real(0) ? Region::BoundaryX0 : Region::DividendPay;
        out.q = f.qstar();
        out.v_s = out.v_x = Real(1) / (beta * w);
        out.v_ss = -Real(1) / (beta * w * w);
        return out;
    }

    const Real q = q_of_z(out.z);
    out.v = log(x) / beta + f.big_n(q) + interior_constant();
    out.region = Region::NoDividend;
    out.q = q;
    out.v_s = q / s;
    out.v_x = (Real(1) / beta - q) / x;
    out.v_ss = q * (Real(1) / f.big_dn(q) - Real(1)) / (s * s);
    return out;
}

template <class Real>
void PolicyEngine<Real>::check_interior_z(const Real& z, const char* who) const {
    if (!(z > Real(0))) throw DomainError(std::string(who) + ": z must be positive");
    if (!(z <= zstar())) {
        throw DomainError(std::string(who) + ": z exceeds z*; apply the dividend action first");
    }
}

template <class Real>
Real PolicyEngine<Real>::theta_of_q(Real q) const {
    const auto& f = frontier();
    const Real beta = params_.beta();
    // N'/(N' - 1) with N' - 1 written out to avoid cancellation
    const Real big_dn = f.big_dn(q);
    return big_dn / (f.dn(q) / beta + beta * q / (Real(1) - beta * q));
}

template <class Real>
Real PolicyEngine<Real>::theta(Real z) const {
    (void)frontier();
    check_interior_z(z, "theta");
    return theta_of_q(q_of_z(z));
}

template <class Real>
Real PolicyEngine<Real>::consumption_ratio(Real z) const {
    (void)frontier();
    if (!(z >= Real(0)) || !(z <= zstar())) {
        throw DomainError("consumption_ratio: z must lie in [0, z*]");
    }
    return Real(1) / (Real(1) / Real(params_.beta()) - q_of_z(z));
}

template <class Real>
Real PolicyEngine<Real>::pi_star(Real s, Real x) const {
    (void)frontier();
    check_state(s, x);
    if (x == Real(0)) throw DomainError("pi_star: x must be positive");
    const Real z = s / x;
    check_interior_z(z, "pi_star");
    if (regime_ == Regime::Corner) return Real(0);
    return Real(params_.merton_ratio()) * theta(z);
}

template <class Real>
Real PolicyEngine<Real>::c_star(Real s, Real x) const {
    check_state(s, x);
    if (x == Real(0)) throw DomainError("c_star: x must be positive");
    if (regime_ == Regime::Degenerate) return Real(params_.beta()) * (s + x);
    return x * consumption_ratio(s / x);
}

template <class Real>
Real PolicyEngine<Real>::dividend_action(Real s, Real x) const {
    check_state(s, x);
    if (regime_ == Regime::Degenerate) {
        if (s == Real(0)) throw NoActionError("dividend_action: nothing to liquidate");
        return s;
    }
    const Real zs = zstar();
    if (x > Real(0)) {
        const Real z = s / x;
        if (z < zs) throw NoActionError("dividend_action: state is inside the no-dividend region");
        if (z == zs) return Real(0);
    }
    return (s - zs * x) / (Real(1) + zs);
}

template class PolicyEngine<double>;
template class PolicyEngine<Quad>;

std::vector<PolicyRow> evaluate_batch(const PolicyEngine<double>& engine, const std::vector<State>& states) {
    std::vector<PolicyRow> rows;
    rows.reserve(states.size());
    const ModelParams& p = engine.params();
    for (const State& st : states) {
        const auto vb = engine.value(st.s, st.x);
        PolicyRow row;
        row.state = st;
        row.z = vb.z;
        row.region = vb.region;
        row.v = vb.v;
        if (engine.regime() == Regime::Degenerate) {
            row.dividend = st.s;
            row.pi_star = 0.0;
            row.c_star = p.beta() * (st.s + st.x);
        } else if (vb.region == Region::DividendPay || vb.region == Region::BoundaryX0) {
            // controls at the barrier, where the post-dividend state sits
            const double q = engine.qstar();
            row.dividend = engine.dividend_action(st.s, st.x);
            row.pi_star = engine.regime() == Regime::Corner ? 0.0 : p.merton_ratio() * engine.theta_of_q(q);
            row.c_star = (st.x + row.dividend) / (1.0 / p.beta() - q);
        } else if (vb.region == Region::BoundaryS0) {
            row.pi_star = engine.regime() == Regime::Corner ? 0.0 : p.merton_ratio() * engine.theta_of_q(0.0);
            row.c_star = p.beta() * st.x;
        } else {
            row.pi_star = engine.pi_star(st.s, st.x);
            row.c_star = st.x / (1.0 / p.beta() - vb.q);
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    while (!s.empty() && !not_space(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && !not_space(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

double parse_field(const std::string& text, std::size_t line) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw ConfigError("states CSV line " + std::to_string(line) + ": cannot parse '" + t + "'");
    }
    return v;
}

}  // namespace

std::vector<State> read_states_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ConfigError("states CSV is empty");
    ++line_no;
    if (trim(line) != "s,x") throw ConfigError("states CSV header must be 's,x'");
    std::vector<State> states;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ConfigError("states CSV line " + std::to_string(line_no) + ": expected two fields");
        }
        State st{parse_field(line.substr(0, comma), line_no), parse_field(line.substr(comma + 1), line_no)};
        try {
            validate_state(st);
        } catch (const DomainError& e) {
            throw ConfigError("states CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        states.push_back(st);
    }
    return states;
}

void write_batch_csv(const std::vector<PolicyRow>& rows, std::ostream& out) {
    const auto old_prec = out.precision(12);
    out << "s,x,z,region,V,pi_star,c_star,dividend\n";
    for (const auto& r : rows) {
        out << r.state.s << ',' << r.state.x << ',' << r.z << ',' << to_string(r.region) << ',' << r.v << ','
            << r.pi_star << ',' << r.c_star << ',' << r.dividend << '\n';
    }
    out.precision(old_prec);
}

}  // namespace divopt
