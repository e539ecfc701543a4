#include "cli.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using divopt::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("divopt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result call(std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::string write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    std::string read(const std::string& name) {
        std::ifstream in(dir_ / name);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::vector<std::string> model(const char* mu, const char* lambda) {
        return {"--mu", mu, "--sigma", "0.3", "--rho", "0.1", "--r", "0.02", "--beta", "0.1", "--lambda", lambda,
                "--out", dir_.string()};
    }

    fs::path dir_;
};

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_F(Cli, SolveCornerPrintsBarrier) {
    const Result r = call(std::vector<std::string>{"solve"} + model("0.1", "0.05"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["zstar"].get<double>(), 0.6, 1e-12);
    EXPECT_EQ(j["regime"], "corner");
    EXPECT_TRUE(fs::exists(dir_ / "solve.json"));
}

TEST_F(Cli, SolveGeneralWithDualAndCurve) {
    const Result r = call(std::vector<std::string>{"solve", "--dual", "--curve"} + model("0.2", "0.05"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(j["qstar_gap"].get<double>(), 1e-8);
    EXPECT_EQ(read("curve.csv").substr(0, 16), "q,n,m,ell,nprime");
}

TEST_F(Cli, VerifyDegenerateExitsZero) {
    const Result r = call(std::vector<std::string>{"verify"} + model("0.1", "0.1"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(read("verify.json"))["pass"].get<bool>());
}

TEST_F(Cli, SimulateZeroPathsIsConfigError) {
    const Result r = call(std::vector<std::string>{"simulate", "--n-paths", "0"} + model("0.2", "0.05"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("n_paths"), std::string::npos);
}

TEST_F(Cli, SimulateIsByteDeterministic) {
    const auto args = std::vector<std::string>{"simulate", "--n-paths", "20", "--dt", "0.01", "--seed", "5"} +
                      model("0.2", "0.05");
    ASSERT_EQ(call(args).code, 0);
    const std::string first = read("simulate.json");
    ASSERT_EQ(call(args).code, 0);
    EXPECT_EQ(read("simulate.json"), first);
    EXPECT_EQ(nlohmann::json::parse(first)["seed"].get<std::uint64_t>(), 5u);
}

TEST_F(Cli, ValueAndPolicyBatches) {
    const std::string states = write("states.csv", "s,x\n0.3,1\n2,1\n0,1\n");
    Result r = call(std::vector<std::string>{"value", "--states", states} + model("0.1", "0.05"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read("value.csv").substr(0, 26), "s,x,z,region,V,q,V_s,V_x,V");
    r = call(std::vector<std::string>{"policy", "--states", states} + model("0.1", "0.05"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = read("policy.csv");
    EXPECT_NE(csv.find("2,1,2,dividend,"), std::string::npos);
    EXPECT_NE(csv.find(",0.875\n"), std::string::npos);
    r = call(std::vector<std::string>{"policy", "--states", states, "--format", "json"} + model("0.1", "0.05"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(read("policy.json")).size(), 3u);
}

TEST_F(Cli, MissingStatesReported) {
    const Result r = call(std::vector<std::string>{"value"} + model("0.1", "0.05"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("batch.states"), std::string::npos);
}

TEST_F(Cli, ConfigFileAndOverrides) {
    const std::string cfg = write("run.json", R"({"model": {"mu": 0.2, "sigma": 0.3, "rho": 0.1, "r": 0.02,
        "beta": 0.1, "lambda": 0.05}, "sweep": {"param": "lambda", "grid": [0.03, 0.05, 0.07, 0.09]}})");
    Result r = call({"sweep", "--config", cfg, "--out", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "sweep_lambda.csv"));
    const auto verdicts = nlohmann::json::parse(read("sweep_lambda_verdicts.json"));
    EXPECT_TRUE(verdicts["pass"].get<bool>());

    r = call({"solve", "--config", cfg, "--lambda", "0.02", "--print-config"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto resolved = nlohmann::json::parse(r.out);
    EXPECT_EQ(resolved["model"]["lambda"].get<double>(), 0.02);
    EXPECT_EQ(resolved["verify"]["precision"], "extended");
}

TEST_F(Cli, UnknownKeyRejected) {
    const std::string cfg = write("bad.json", R"({"model": {"mu": 0.2}, "simulate": {"paths": 3}})");
    const Result r = call({"solve", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("simulate.paths"), std::string::npos);
}

TEST_F(Cli, MissingModelKeysNamed) {
    const std::string cfg = write("partial.json", R"({"model": {"mu": 0.2, "sigma": 0.3}})");
    const Result r = call({"solve", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("model.rho"), std::string::npos);
    EXPECT_NE(r.err.find("model.lambda"), std::string::npos);
}

TEST_F(Cli, WrongTypeRejected) {
    const std::string cfg = write("typed.json", R"({"verify": {"n_z": "many"}})");
    EXPECT_EQ(call({"verify", "--config", cfg}).code, 2);
    const std::string neg = write("neg.json", R"({"simulate": {"n_paths": -3}})");
    EXPECT_EQ(call({"simulate", "--config", neg}).code, 2);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"frobnicate"}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
    EXPECT_EQ(call(std::vector<std::string>{"solve", "--precision", "half"} + model("0.2", "0.05")).code, 2);
}

TEST_F(Cli, SolverFailureExitCode) {
    const std::string cfg = write("floor.json", R"({"solve": {"contact_floor": 1000.0}})");
    const Result r = call(std::vector<std::string>{"solve", "--config", cfg} + model("0.2", "0.05"));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("solver failure"), std::string::npos);
}

TEST_F(Cli, InvalidModelIsConfigError) {
    const Result r = call({"solve", "--mu", "0.2", "--sigma", "-1", "--rho", "0.1", "--r", "0.02", "--beta", "0.1",
                           "--lambda", "0.05", "--out", dir_.string()});
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, SweepCheckFailureExitsOne) {
    const std::string cfg = write("sweep.json", R"({"sweep": {"param": "lambda", "grid": [0.03, 0.05, 0.07],
        "checks": [{"column": "zstar", "direction": "increasing"}]}})");
    const Result r = call(std::vector<std::string>{"sweep", "--config", cfg} + model("0.2", "0.05"));
    EXPECT_EQ(r.code, 1);
}
