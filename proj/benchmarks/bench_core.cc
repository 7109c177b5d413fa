#include <benchmark/benchmark.h>

#include "scissortruss/dynamics.hpp"
#include "scissortruss/kinematics.hpp"
#include "scissortruss/materials.hpp"
#include "scissortruss/optimize/geometry_optimization.hpp"
#include "scissortruss/optimize/surrogate.hpp"

using namespace scissortruss;

namespace {

const UnitGeometry& baseline_unit() {
  static const UnitGeometry u = synthesize_unit(kEqChainHeight, kDeployedAngleDeg, kStowedAngleDeg);
  return u;
}

void BM_SynthesizeUnit(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_unit(5.09, 80.0, 12.54));
  }
}
BENCHMARK(BM_SynthesizeUnit);

void BM_DesignMetrics(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_metrics(25.0, 12, true));
  }
}
BENCHMARK(BM_DesignMetrics);

void BM_SolveState(benchmark::State& state) {
  const double theta = deg_to_rad(46.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_state(baseline_unit(), theta, 0.1));
  }
}
BENCHMARK(BM_SolveState);

void BM_DeploymentProfile(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        deployment_profile(baseline_unit(), 0.1, DeployDirection::kDeploy, steps));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_DeploymentProfile)->Arg(100)->Arg(1000);

void BM_SimulateOscillation(benchmark::State& state) {
  const DynamicParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_oscillation(p, {0.1, 0.0, 0.0}, 0.01, 707.6));
  }
}
BENCHMARK(BM_SimulateOscillation);

void BM_GaSphere(benchmark::State& state) {
  GAConfig cfg;
  cfg.population_size = 50;
  cfg.generations = 200;
  cfg.stall_generation_limit = 1000;
  const Bounds box{Vector::Constant(5, -5.0), Vector::Constant(5, 5.0)};
  const auto sphere = [](const Vector& x) { return x.squaredNorm(); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(ga_optimize(sphere, box, cfg));
  }
}
BENCHMARK(BM_GaSphere)->Unit(benchmark::kMillisecond);

void BM_SqpRosenbrock(benchmark::State& state) {
  const ScalarFunction f{[](const Vector& x) {
                           return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) +
                                  (1.0 - x[0]) * (1.0 - x[0]);
                         },
                         {}};
  Vector x0(2);
  x0 << -1.2, 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqp_refine(f, x0, {}));
  }
}
BENCHMARK(BM_SqpRosenbrock);

void BM_SurrogateSingleRun(benchmark::State& state) {
  const CurveDataset data = normalize_dataset(kinematic_dataset(baseline_unit(), 0.1, 100));
  SurrogateOptions opts;
  opts.runs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_kinematics_surrogate(data, opts));
  }
}
BENCHMARK(BM_SurrogateSingleRun)->Unit(benchmark::kMillisecond);

void BM_OptimizeGeometry(benchmark::State& state) {
  GeometryProblem p;
  p.baseline = make_design(25.0, 12, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_geometry(p));
  }
}
BENCHMARK(BM_OptimizeGeometry)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
