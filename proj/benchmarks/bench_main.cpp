#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "xferbo/acquisition.hpp"
#include "xferbo/benchmarks.hpp"
#include "xferbo/doe.hpp"
#include "xferbo/ensemble.hpp"
#include "xferbo/gp.hpp"

using namespace xferbo;

namespace {

Doe sampled(const ProblemSpec& spec, std::size_t n, std::uint64_t seed) {
    return evaluate_doe(spec, lhs_sample(spec.variables, n, seed));
}

GpConfig bench_gp_config() {
    GpConfig c;
    c.seed = 11;
    return c;
}

void BM_TrainSe(benchmark::State& state) {
    const auto c = rosenbrock_mf_case(5);
    const Doe doe = sampled(c.target, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(train_gp(doe, -1, KernelKind::se, bench_gp_config()));
}
BENCHMARK(BM_TrainSe)->Arg(10)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_TrainKpls(benchmark::State& state) {
    const auto c = rosenbrock_mf_case(5);
    const Doe doe = sampled(c.target, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(train_gp(doe, -1, KernelKind::kpls, bench_gp_config()));
}
BENCHMARK(BM_TrainKpls)->Arg(10)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
    const auto c = rosenbrock_mf_case(5);
    const Doe doe = sampled(c.target, static_cast<std::size_t>(state.range(0)), 1);
    const GpModel gp = train_gp(doe, -1, KernelKind::se, bench_gp_config());
    const Eigen::MatrixXd pts = uniform_sample(c.target.variables, 256, 2);
    Eigen::Index i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gp.predict(pts.row(i).transpose()));
        i = (i + 1) % pts.rows();
    }
}
BENCHMARK(BM_Predict)->Arg(10)->Arg(50)->Arg(100);

void BM_BuildEnsemble(benchmark::State& state) {
    const auto c = bohachevsky_case();
    std::vector<SourceData> sources;
    for (std::size_t j = 0; j < c.sources.size(); ++j) {
        const Doe d = sampled(c.sources[j].problem, 50, 10 + j);
        sources.push_back({c.sources[j].name, d.inputs(), d.objective(), d.variables()});
    }
    const Doe target = sampled(c.target, static_cast<std::size_t>(state.range(0)), 3);
    const EnsembleConfig config;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_ensemble(sources, target, -1, config, bench_gp_config()));
}
BENCHMARK(BM_BuildEnsemble)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_Acquisition(benchmark::State& state) {
    const auto c = bohachevsky_case();
    const Doe doe = sampled(c.target, 15, 4);
    const GpModel gp = train_gp(doe, -1, KernelKind::se, bench_gp_config());
    AcquisitionConfig ac;
    ac.candidate_count = static_cast<std::size_t>(state.range(0));
    const double y_min = doe.objective().minCoeff();
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(maximize_constrained(gp, {}, c.target.variables, y_min, ac, ++seed));
}
BENCHMARK(BM_Acquisition)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExpectedImprovement(benchmark::State& state) {
    double m = -0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_improvement(m, 0.7, 0.1));
        m += 1e-9;
    }
}
BENCHMARK(BM_ExpectedImprovement);

} // namespace
BENCHMARK_MAIN();
