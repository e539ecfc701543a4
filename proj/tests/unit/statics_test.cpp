#include "common.hpp"

#include "divopt/statics.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace divopt;
using namespace divopt::test;

namespace {

std::vector<double> lambda_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 15; ++i) g.push_back(0.01 * i);
    return g;
}

const SweepTable& lambda_table() {
    static const SweepTable t = sweep(base_params(), "lambda", lambda_grid());
    return t;
}

bool all_pass(const SweepTable& t, const std::string& prefix, Direction d) {
    bool any = false;
    for (const auto& name : t.column_names()) {
        if (name.rfind(prefix, 0) != 0) continue;
        any = true;
        if (!monotonicity_check(t, name, d).pass) return false;
    }
    return any;
}

}  // namespace

TEST(Sweep, LambdaShapes) {
    const SweepTable& t = lambda_table();
    ASSERT_EQ(t.rows.size(), 15u);
    for (const auto& r : t.rows) EXPECT_TRUE(r.converged);
    EXPECT_TRUE(monotonicity_check(t, "zstar", Direction::Decreasing).pass);
    EXPECT_TRUE(all_pass(t, "pi_q", Direction::Increasing));
    EXPECT_TRUE(all_pass(t, "pi_zmin", Direction::Increasing));
    EXPECT_TRUE(all_pass(t, "cbar_q", Direction::Decreasing));
    EXPECT_TRUE(all_pass(t, "cbar_zmin", Direction::Decreasing));
}

TEST(Sweep, RowsSortedAndSampled) {
    const SweepTable t = sweep(base_params(), "lambda", {0.1, 0.02, 0.05});
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].value, 0.02);
    EXPECT_EQ(t.rows[2].value, 0.1);
    EXPECT_EQ(t.rows[1].theta.size(), 4u);
    EXPECT_EQ(t.rows[1].pi_abs.size(), 3u);
    EXPECT_NEAR(t.rows[1].zstar, kBaseZstar, 1e-9);
    EXPECT_NEAR(t.rows[1].theta[3] * 0.1 * t.rows[1].qstar, 1.0, 1e-12);
    EXPECT_NEAR(t.abs_z[0], 0.25 * t.rows[2].zstar, 1e-15);
}

TEST(Sweep, OtherParameters) {
    const SweepTable r = sweep(base_params(), "r", {0.0, 0.01, 0.02, 0.03, 0.04});
    EXPECT_TRUE(monotonicity_check(r, "zstar", Direction::Decreasing).pass);
    const SweepTable s = sweep(base_params(), "sigma", {0.2, 0.25, 0.3, 0.35, 0.4});
    EXPECT_TRUE(monotonicity_check(s, "zstar", Direction::Decreasing).pass);
    const SweepTable m = sweep(base_params(), "mu", {0.12, 0.15, 0.2, 0.25, 0.3});
    EXPECT_TRUE(monotonicity_check(m, "zstar", Direction::Increasing).pass);
}

TEST(Sweep, LowerBoundLaw) {
    for (const auto& r : lambda_table().rows) {
        const double bound = std::max(0.1 - 0.02 - r.value, 0.0) / r.value;
        EXPECT_GE(r.zstar, bound);
    }
}

TEST(Sweep, CornerLimitContinuity) {
    const SweepTable t = sweep(corner_params(), "mu", {0.1 - 1e-3, 0.1 + 1e-3});
    for (const auto& r : t.rows) EXPECT_NEAR(r.zstar / 0.6, 1.0, 1e-2);
}

TEST(Sweep, CornerRowsAllowed) {
    const SweepTable t = sweep(corner_params(), "lambda", {0.03, 0.05, 0.07});
    for (const auto& r : t.rows) {
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.zstar, (0.1 - 0.02 - r.value) / r.value, 1e-12);
        for (double p : r.pi) EXPECT_EQ(p, 0.0);
    }
}

TEST(Sweep, Preconditions) {
    EXPECT_THROW((void)sweep(base_params(), "lambda", {}), ConfigError);
    EXPECT_THROW((void)sweep(base_params(), "gamma", {0.1}), ConfigError);
    EXPECT_THROW((void)sweep(corner_params(), "lambda", {0.05, 0.1}), ConfigError);  // degenerate point
    EXPECT_THROW((void)sweep(base_params(), "sigma", {0.0}), ConfigError);
}

TEST(Sweep, SolverFailureBecomesGapRow) {
    SweepOptions o;
    o.solver.contact_floor = 1e3;
    const SweepTable t = sweep(base_params(), "lambda", {0.03, 0.05}, o);
    for (const auto& r : t.rows) {
        EXPECT_FALSE(r.converged);
        EXPECT_FALSE(r.error.empty());
    }
    std::ostringstream os;
    write_sweep_csv(t, os);
    EXPECT_NE(os.str().find("0.03,0,,"), std::string::npos);
    EXPECT_FALSE(monotonicity_check(t, "zstar", Direction::Decreasing).pass);
}

TEST(Monotonicity, ConstantColumnFailsAtRowOne) {
    SweepTable t;
    t.param_name = "lambda";
    for (int i = 0; i < 4; ++i) {
        SweepRow r;
        r.value = i;
        r.converged = true;
        r.qstar = 1.0;
        r.zstar = 1.0;
        t.rows.push_back(r);
    }
    const MonotonicityResult inc = monotonicity_check(t, "zstar", Direction::Increasing);
    EXPECT_FALSE(inc.pass);
    ASSERT_TRUE(inc.first_violation.has_value());
    EXPECT_EQ(*inc.first_violation, 1u);
    EXPECT_FALSE(monotonicity_check(t, "zstar", Direction::Decreasing).pass);
}

TEST(Monotonicity, SlackAndShortTables) {
    SweepTable t;
    for (double z : {1.0, 1.0 + 5e-9, 2.0}) {
        SweepRow r;
        r.converged = true;
        r.zstar = z;
        t.rows.push_back(r);
    }
    EXPECT_FALSE(monotonicity_check(t, "zstar", Direction::Increasing).pass);
    EXPECT_TRUE(monotonicity_check(t, "zstar", Direction::Increasing, 1e-9).pass);
    t.rows.pop_back();
    EXPECT_FALSE(monotonicity_check(t, "zstar", Direction::Increasing, 0.0).pass);
    EXPECT_THROW((void)monotonicity_check(t, "nope", Direction::Increasing), ConfigError);
}

TEST(Monotonicity, ParseDirection) {
    EXPECT_EQ(parse_direction("increasing"), Direction::Increasing);
    EXPECT_EQ(parse_direction("decreasing"), Direction::Decreasing);
    EXPECT_THROW((void)parse_direction("up"), ConfigError);
}

TEST(Sweep, CsvHeaderNamesEveryColumn) {
    std::ostringstream os;
    write_sweep_csv(lambda_table(), os);
    const std::string text = os.str();
    const std::string header = text.substr(0, text.find('\n'));
    EXPECT_EQ(header.rfind("value,converged,qstar,zstar,theta_q0.25", 0), 0u);
    EXPECT_NE(header.find("pi_zmin0.75"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 16);
}
