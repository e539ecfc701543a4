#include "divopt/frontier.hpp"
#include "divopt/hjb_verifier.hpp"
#include "divopt/policy.hpp"
#include "divopt/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace divopt;

namespace {

const ModelParams kBase(ParamSet{0.2, 0.3, 0.1, 0.02, 0.1, 0.05});

const PolicyEngine<double>& engine() {
    static const PolicyEngine<double> e(kBase);
    return e;
}

void BM_SolveFrontier(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(solve_frontier(kBase).qstar());
}
BENCHMARK(BM_SolveFrontier)->Unit(benchmark::kMillisecond);

void BM_SolveFrontierB(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(solve_frontier_b(kBase));
}
BENCHMARK(BM_SolveFrontierB)->Unit(benchmark::kMillisecond);

void BM_SolveFrontierExtended(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(solve_frontier<Quad>(kBase, SolverOptions::extended()).qstar());
}
BENCHMARK(BM_SolveFrontierExtended)->Unit(benchmark::kMillisecond);

void BM_Value(benchmark::State& st) {
    const auto& e = engine();
    double z = 0.01;
    for (auto _ : st) {
        benchmark::DoNotOptimize(e.value(z, 1.0).v);
        z = z < 1.5 ? z * 1.01 : 0.01;
    }
}
BENCHMARK(BM_Value);

void BM_QOfZ(benchmark::State& st) {
    const auto& e = engine();
    double z = 1e-6;
    for (auto _ : st) {
        benchmark::DoNotOptimize(e.q_of_z(z));
        z = z < 1.5 ? z * 1.05 : 1e-6;
    }
}
BENCHMARK(BM_QOfZ);

void BM_ResidualNode(benchmark::State& st) {
    const auto& e = engine();
    for (auto _ : st) benchmark::DoNotOptimize(residual_at(e, 0.5, 1.0, 1e-4).l);
}
BENCHMARK(BM_ResidualNode);

// items processed = path steps
void BM_Simulate(benchmark::State& st) {
    SimConfig c;
    c.n_paths = 256;
    c.dt = 1e-2;
    c.horizon = 100.0;
    if (st.range(0) == 1) c.policy = PolicySpec::constant_barrier(1.0, 2.0, 0.15);
    std::size_t steps = 0;
    for (auto _ : st) {
        const SimReport r = simulate(c, engine());
        benchmark::DoNotOptimize(r.estimate);
        steps += r.steps * r.n_paths;
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
