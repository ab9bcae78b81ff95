#include <benchmark/benchmark.h>

#include "sysid/estimator.hpp"
#include "sysid/experiment.hpp"
#include "sysid/input_design.hpp"
#include "sysid/systems.hpp"
#include "sysid/trust_region.hpp"

namespace {

using namespace sysid;

Dataset sample_data(const BenchmarkCase& bench, int n) {
  Rng rng(1);
  auto data = bench.make_dataset();
  for (int i = 0; i < n; ++i) {
    const Vector x = bench.input_constraint.sample(rng, bench.oracle.input_dim());
    data.append(x, bench.oracle.query(x));
  }
  return data;
}

void BM_TrustRegion(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  Matrix a(d, d);
  for (int i = 0; i < d * d; ++i) a.data()[i] = rng.normal();
  const Matrix h = a * a.transpose();
  Vector r(d);
  for (int i = 0; i < d; ++i) r[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(solve_trust_region(h, r, 0.1));
}
BENCHMARK(BM_TrustRegion)->Arg(2)->Arg(4)->Arg(6);

void BM_MapStep(benchmark::State& state) {
  const auto bench = systems::linear_case();
  const auto data = sample_data(bench, static_cast<int>(state.range(0)));
  const auto prior = GaussianBelief::uniform(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        map_step(data, bench.family, Vector::Zero(4), Matrix::Identity(2, 2), prior, 0.3));
  }
}
BENCHMARK(BM_MapStep)->Arg(5)->Arg(35);

void BM_DesignInput(benchmark::State& state) {
  const auto bench = systems::henon_case();
  const auto data = sample_data(bench, 10);
  const auto obj = make_information_objective(data.inputs(), *bench.theta_true, bench.family,
                                              Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                              Measure::LogDet, 100.0, bench.input_constraint);
  const DesignSpace space{Vector::Zero(2), bench.designable};
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(design_input(obj, *bench.theta_true, bench.family, space, rng));
  }
}
BENCHMARK(BM_DesignInput)->Unit(benchmark::kMillisecond);

void BM_AlgorithmStep(benchmark::State& state) {
  const auto bench = systems::case_by_name(systems::case_names()[state.range(0)]);
  ExperimentConfig config;
  Rng data_rng(1);
  const auto initial = initial_dataset(bench, config.n0, data_rng);
  for (auto _ : state) {
    state.PauseTiming();
    Rng rng(2);
    auto s = initialize_seed(bench, initial, config, rng);
    state.ResumeTiming();
    benchmark::DoNotOptimize(run_active_step(bench, s, config, rng));
  }
  state.SetLabel(bench.name);
}
BENCHMARK(BM_AlgorithmStep)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
