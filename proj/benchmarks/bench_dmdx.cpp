#include <map>

#include <benchmark/benchmark.h>

#include "dmdx/dmd.hpp"
#include "dmdx/pod_deim.hpp"
#include "dmdx/solvers.hpp"

namespace {

using namespace dmdx;

// Uniform nodal snapshots of a benchmark problem, as the harness builds them.
struct Fixture {
    PdeProblem problem;
    TimeGrid grid;
    Trajectory interior;
    Trajectory nodal;

    Fixture(const char* test, Eigen::Index n, Eigen::Index snapshots) : problem(make_test_problem(test, n)) {
        grid = plan_time_grid(problem, snapshots - 1);
        SolveOptions opts;
        opts.grid = grid;
        opts.record_every = grid.steps / (snapshots - 1);
        interior = solve(problem, opts);
        nodal = with_boundary_nodes(interior, problem);
    }
};

const Fixture& fixture_2b(Eigen::Index n) {
    static std::map<Eigen::Index, Fixture> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Fixture("2b", n, 500)).first;
    return it->second;
}

const char* observable_for(int64_t k) { return k == 0 ? "u" : "u,u^3"; }

void BM_DmdFit(benchmark::State& state) {
    const auto& f = fixture_2b(state.range(0));
    const auto g = ObservableMap::parse(observable_for(state.range(1)));
    const auto pair = build_snapshot_pair(f.nodal, 200);
    for (auto _ : state) benchmark::DoNotOptimize(fit(pair, g, 1e-8));
    state.SetLabel(observable_for(state.range(1)));
}
BENCHMARK(BM_DmdFit)->ArgsProduct({{100, 500}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_DmdPredictHorizon(benchmark::State& state) {
    const auto& f = fixture_2b(state.range(0));
    const auto model = fit(build_snapshot_pair(f.nodal, 200), ObservableMap::parse("u,u^3"), 1e-8);
    for (auto _ : state) {
        for (Eigen::Index n = 0; n < f.nodal.size(); ++n) benchmark::DoNotOptimize(predict(model, n));
    }
}
BENCHMARK(BM_DmdPredictHorizon)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_TruncatedSvd(benchmark::State& state) {
    const auto& f = fixture_2b(state.range(0));
    const Matrix y = ObservableMap::parse("u,u^3").lift_columns(f.nodal.states.leftCols(200));
    for (auto _ : state) benchmark::DoNotOptimize(truncated_svd(y, 1e-8));
}
BENCHMARK(BM_TruncatedSvd)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_PodDeimFit(benchmark::State& state) {
    const auto& f = fixture_2b(state.range(0));
    const Matrix train = f.interior.states.leftCols(201);
    for (auto _ : state) {
        const auto pod = fit_pod(train, 1e-8);
        benchmark::DoNotOptimize(fit_deim(pod, nonlinear_snapshots(f.problem, train), 1e-8));
    }
}
BENCHMARK(BM_PodDeimFit)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_PodDeimIntegrate(benchmark::State& state) {
    const auto& f = fixture_2b(state.range(0));
    const Matrix train = f.interior.states.leftCols(201);
    const auto pod = fit_pod(train, 1e-8);
    const auto deim = fit_deim(pod, nonlinear_snapshots(f.problem, train), 1e-8);
    SolveOptions opts;
    opts.grid = f.grid;
    opts.record_every = f.grid.steps / 499;
    for (auto _ : state) benchmark::DoNotOptimize(rom_integrate(pod, deim, f.problem, opts));
}
BENCHMARK(BM_PodDeimIntegrate)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state, const char* test) {
    const auto p = make_test_problem(test, state.range(0));
    SolveOptions opts;
    opts.record_every = 100;
    for (auto _ : state) benchmark::DoNotOptimize(solve(p, opts));
}
BENCHMARK_CAPTURE(BM_Solve, heat_1a, "1a")->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, reaction_2b, "2b")->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, kirchhoff_3, "3")->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, nls_4, "4")->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
