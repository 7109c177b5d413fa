#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "scissortruss/optimize/geometry_optimization.hpp"
#include "scissortruss/optimize/surrogate.hpp"

using namespace scissortruss;

namespace {

double sphere(const Vector& x) { return x.squaredNorm(); }

double rosenbrock(const Vector& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

Vector rosenbrock_gradient(const Vector& x) {
  Vector g(2);
  g[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
  g[1] = 200.0 * (x[1] - x[0] * x[0]);
  return g;
}

Bounds box(int n, double half) {
  return {Vector::Constant(n, -half), Vector::Constant(n, half)};
}

double max_rel_diff(const Vector& a, const Vector& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-12);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::vector<double> grid(int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(static_cast<double>(i) / (n - 1));
  return t;
}

bool feasible(const GeometryProblem& p, const GeometryPoint& x) {
  if (x.radius < p.r_min) return false;
  if (p.r_max && x.radius > *p.r_max) return false;
  for (double s : x.scales) {
    if (s < p.scale_lo || s > p.scale_hi) return false;
  }
  const double f = frequency_at(p, x);
  return f >= p.f_lo && f <= p.f_hi;
}

}  // namespace

TEST_CASE("network forward pass") {
  const NetworkArchitecture one{1};
  CHECK(one.block_size() == 4);
  // [phi, eta, b_hidden, b_out]
  const std::vector<double> zeros(4, 0.0);
  CHECK(nn_forward(zeros, 0.3, one) == 0.0);
  const std::vector<double> single{0.0, 2.0, 0.0, 0.0};
  CHECK(nn_forward(single, 0.7, one) == doctest::Approx(1.0).epsilon(1e-15));

  const NetworkArchitecture arch;
  CHECK(arch.block_size() == 31);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> w(arch.block_size());
  for (double& v : w) v = u(rng);
  const double a = nn_forward(w, 0.42, arch);
  const double b = nn_forward(w, 0.42, arch);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);

  CHECK_THROWS_AS(nn_forward(single, 0.0, arch), std::invalid_argument);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("genetic algorithm on the sphere") {
  GAConfig cfg;
  cfg.population_size = 50;
  cfg.generations = 200;
  cfg.stall_generation_limit = 1000;
  cfg.seed = 11;
  const GAResult r = ga_optimize(sphere, box(5, 5.0), cfg);
  CHECK(r.best_fitness <= 1e-2);
  CHECK(r.trace.size() == static_cast<std::size_t>(r.generations) + 1);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

  // Uniform random search with the same number of evaluations.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double random_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < r.function_evals; ++i) {
    Vector x(5);
    for (int k = 0; k < 5; ++k) x[k] = u(rng);
    random_best = std::min(random_best, sphere(x));
  }
  MESSAGE("GA " << r.best_fitness << " vs random search " << random_best << " over "
                << r.function_evals << " evaluations");
  CHECK(r.best_fitness < random_best);
}

TEST_CASE("genetic algorithm stops once the target is met") {
  GAConfig cfg;
  cfg.fitness_target = std::numeric_limits<double>::infinity();
  const GAResult r = ga_optimize(sphere, box(3, 1.0), cfg);
  CHECK(r.generations == 0);
  CHECK(r.trace.size() == 1);
  CHECK(r.stop == GAStop::kFitnessTarget);
  CHECK(r.best_fitness == r.trace.front());
}

TEST_CASE("genetic algorithm is reproducible") {
  GAConfig cfg;
  cfg.generations = 40;
  const GAResult a = ga_optimize(rosenbrock, box(2, 2.0), cfg);
  const GAResult b = ga_optimize(rosenbrock, box(2, 2.0), cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.best == b.best);

  cfg.threads = 4;
  const GAResult c = ga_optimize(rosenbrock, box(2, 2.0), cfg);
  CHECK(a.trace == c.trace);
  CHECK(a.best == c.best);

  cfg.threads = 1;
  cfg.seed += 1;
  const GAResult d = ga_optimize(rosenbrock, box(2, 2.0), cfg);
  CHECK(a.trace != d.trace);
}

TEST_CASE("genetic algorithm rejects non-finite fitness") {
  const auto holey = [](const Vector& x) {
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
  };
  GAConfig cfg;
  cfg.generations = 30;
  const GAResult r = ga_optimize(holey, box(2, 1.0), cfg);
  CHECK(r.rejected > 0);
  CHECK(std::isfinite(r.best_fitness));
  CHECK(r.best[0] <= 0.5);
  CHECK_FALSE(r.log.empty());
}

TEST_CASE("genetic algorithm configuration") {
  GAConfig cfg;
  cfg.population_size = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = GAConfig{};
  cfg.mutation_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(GAConfig{}.population_size == 30);
  CHECK(GAConfig{}.generations == 20);
  CHECK(GAConfig{}.stall_generation_limit == 100);
}

TEST_CASE("SQP on unconstrained problems") {
  const ScalarFunction quad{[](const Vector& x) { return std::pow(x[0] - 3.0, 2); }, {}};
  const RefineResult q = sqp_refine(quad, Vector::Zero(1), {});
  CHECK(std::abs(q.x[0] - 3.0) <= 1e-6);
  CHECK(q.objective <= q.objective_trace.front());

  const ScalarFunction rosen{rosenbrock, rosenbrock_gradient};
  Vector x0(2);
  x0 << -1.2, 1.0;
  const RefineResult r = sqp_refine(rosen, x0, {});
  CHECK(r.objective <= 1e-8);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
  }

  // Without an analytic gradient the solver differences numerically.
  const RefineResult fd = sqp_refine({rosenbrock, {}}, x0, {});
  CHECK(fd.objective <= 1e-8);
}

TEST_CASE("SQP with an active constraint") {
  const ScalarFunction obj{[](const Vector& x) { return x[0] * x[0]; }, {}};
  const ScalarFunction c{[](const Vector& x) { return x[0] - 1.0; }, {}};
  const RefineResult r = sqp_refine(obj, Vector::Constant(1, 5.0), {c});
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-6);
  CHECK(r.max_violation <= RefineConfig{}.tol_con + 1e-12);
  REQUIRE(r.multipliers.size() == 1);
  CHECK(r.multipliers[0] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("SQP reports an exhausted budget") {
  RefineConfig cfg;
  cfg.max_function_evals = 5;
  Vector x0(2);
  x0 << -1.2, 1.0;
  const RefineResult r = sqp_refine({rosenbrock, rosenbrock_gradient}, x0, {}, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.status == RefineStatus::kMaxFunctionEvals);
  CHECK(r.objective <= rosenbrock(x0));
}

TEST_CASE("quadratic subproblem") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
  Vector g(2);
  g << -2.0, -2.0;
  Eigen::MatrixXd j(1, 2);
  j << -1.0, 0.0;
  Vector c(1);
  c << 0.5;  // d0 <= 0.5
  const QpSolution s = solve_inequality_qp(b, g, j, c);
  REQUIRE(s.feasible);
  CHECK(s.step[0] == doctest::Approx(0.5));
  CHECK(s.step[1] == doctest::Approx(2.0));
  CHECK(s.multipliers[0] == doctest::Approx(1.5));

  Eigen::MatrixXd j2(2, 1);
  j2 << 1.0, -1.0;
  Vector c2(2);
  c2 << -2.0, -2.0;  // d >= 2 and d <= -2
  CHECK_FALSE(solve_inequality_qp(Eigen::MatrixXd::Identity(1, 1), Vector::Zero(1), j2, c2).feasible);
}

TEST_CASE("gradients agree with central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  for (int trial = 0; trial < 20; ++trial) {
    Vector x(2);
    x << u(rng), u(rng);
    CHECK(max_rel_diff(rosenbrock_gradient(x), central_gradient(rosenbrock, x)) < 1e-6);
  }

  const NetworkArchitecture arch;
  const auto t = grid(40);
  std::vector<double> y;
  for (double ti : t) y.push_back(std::sin(3.0 * ti));
  for (int trial = 0; trial < 20; ++trial) {
    Vector w(static_cast<Eigen::Index>(arch.block_size()));
    for (auto& v : w) v = u(rng);
    const auto span = [](const Vector& v) {
      return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
    };
    const Vector analytic = block_mse_gradient(span(w), arch, t, y);
    const Vector numeric =
        central_gradient([&](const Vector& v) { return block_mse(span(v), arch, t, y); }, w);
    CHECK(max_rel_diff(analytic, numeric) < 1e-6);
  }
}

TEST_CASE("surrogate recovers a realizable target") {
  const NetworkArchitecture arch;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Chromosome truth(arch);
  for (double& v : truth.weights) v = u(rng);

  CurveDataset data;
  data.t = grid(100);
  for (std::size_t c = 0; c < kCurveCount; ++c) {
    for (double t : data.t) data.curves[c].push_back(nn_forward(truth.block(c), t, arch));
  }
  SurrogateOptions opts;
  opts.runs = 3;
  // BFGS needs more than the default 1000 iterations to reach the noise floor here.
  opts.refine.max_iterations = 5000;
  const SurrogateFit fit = fit_kinematics_surrogate(data, opts);
  for (std::size_t c = 0; c < kCurveCount; ++c) {
    CAPTURE(c);
    CHECK(fit.best_fitness[c] <= 1e-10);
  }
  CHECK(fit.warnings.empty());
}

TEST_CASE("surrogate fits zero curves") {
  CurveDataset data;
  data.t = grid(50);
  for (auto& c : data.curves) c.assign(data.t.size(), 0.0);

  Chromosome zero;
  const std::vector<double> none(data.t.size(), 0.0);
  CHECK(block_mse(zero.block(0), zero.arch, data.t, none) == 0.0);

  SurrogateOptions opts;
  opts.runs = 1;
  const SurrogateFit fit = fit_kinematics_surrogate(data, opts);
  for (double f : fit.best_fitness) CHECK(f <= 1e-8);
}

TEST_CASE("surrogate fits the deployment curves") {
  const CurveDataset data =
      normalize_dataset(kinematic_dataset(synthesize_unit(5.09, 80.0, 12.54), 0.1, 100));
  REQUIRE(data.t.size() == 101);
  const auto start = std::chrono::steady_clock::now();
  const SurrogateFit fit = fit_kinematics_surrogate(data, SurrogateOptions{});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("surrogate fit took " << seconds << " s");
  CHECK(seconds < 60.0);
  CHECK(fit.runs.size() == 10);
  for (std::size_t c = 0; c < kCurveCount; ++c) {
    CAPTURE(kCurveNames[c]);
    CHECK(fit.best_fitness[c] <= 1e-4);
    CHECK(block_mse(fit.best.block(c), fit.best.arch, data.t, data.curves[c]) ==
          doctest::Approx(fit.best_fitness[c]).epsilon(1e-12));
  }
  for (const RunRecord& run : fit.runs) {
    for (const CurveFitRecord& rec : run.curves) CHECK(rec.refined_fitness <= rec.ga_fitness);
  }
}

TEST_CASE("surrogate warns when underdetermined") {
  CurveDataset data;
  data.t = grid(10);
  for (auto& c : data.curves) c.assign(data.t.size(), 0.5);
  SurrogateOptions opts;
  opts.runs = 1;
  opts.ga.generations = 2;
  const SurrogateFit fit = fit_kinematics_surrogate(data, opts);
  REQUIRE_FALSE(fit.warnings.empty());
  CHECK(fit.warnings.front().find("underdetermined") != std::string::npos);
}

TEST_CASE("surrogate fit is deterministic") {
  const CurveDataset data =
      normalize_dataset(kinematic_dataset(synthesize_unit(5.09, 80.0, 12.54), 0.1, 40));
  SurrogateOptions opts;
  opts.runs = 2;
  const SurrogateFit a = fit_kinematics_surrogate(data, opts);
  const SurrogateFit b = fit_kinematics_surrogate(data, opts);
  CHECK(a.best.weights == b.best.weights);
  CHECK(a.best_fitness == b.best_fitness);
}

TEST_CASE("geometry optimization meets its constraints") {
  GeometryProblem p;
  p.baseline = make_design(25, 12, true);
  const GeometryResult r = optimize_geometry(p);
  REQUIRE_FALSE(r.infeasible_window);
  CHECK_FALSE(r.flat_objective);
  CHECK(r.feasible);

  const double tol = p.refine.tol_con;
  CHECK(r.point.radius >= p.r_min - tol);
  CHECK(r.frequency_hz >= p.f_lo - tol);
  CHECK(r.frequency_hz <= p.f_hi + tol);
  for (const auto& c : r.constraints) {
    CAPTURE(c.name);
    CHECK(c.satisfied);
    CHECK(c.value >= -tol);
  }
  CHECK(r.frequency_hz == doctest::Approx(frequency_at(p, r.point)).epsilon(1e-12));

  REQUIRE_FALSE(r.objective_trace.empty());
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
  }

  // Local optimality probe: feasible 1% moves must not lower the frequency.
  const Vector x = r.point.to_vector();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vector y = x;
      y[i] *= 1.0 + sign * 0.01;
      const GeometryPoint q = GeometryPoint::from_vector(y);
      if (!feasible(p, q)) continue;
      CHECK(frequency_at(p, q) >= r.frequency_hz - p.refine.tol_fun);
    }
  }
}

TEST_CASE("geometry optimization mass scaling") {
  GeometryProblem p;
  p.baseline = make_design(25, 12, true);
  const GeometryPoint base{12.5, {1.0, 1.0, 1.0, 1.0}};
  CHECK(unit_mass(p, base) == doctest::Approx(p.baseline.unit.total_link_length()));
  const GeometryPoint doubled{25.0, {1.0, 1.0, 1.0, 1.0}};
  CHECK(frequency_at(p, doubled) ==
        doctest::Approx(frequency_at(p, base) / std::sqrt(2.0)).epsilon(1e-12));
  const AntennaDesign d = design_at(p, doubled);
  CHECK(d.aperture == doctest::Approx(50.0));
}

TEST_CASE("geometry optimization reports an empty window") {
  GeometryProblem p;
  p.baseline = make_design(25, 12, true);
  p.r_min = 40.0;
  const GeometryResult r = optimize_geometry(p);
  CHECK(r.infeasible_window);
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("geometry optimization detects a flat objective") {
  GeometryProblem p;
  p.baseline = make_design(25, 12, true);
  p.mass.enabled = false;
  p.f_lo = 0.1;
  p.f_hi = 0.2;
  const GeometryResult r = optimize_geometry(p);
  CHECK(r.flat_objective);
  CHECK_FALSE(r.warnings.empty());
  const GeometryPoint a{13.0, {1.0, 1.0, 1.0, 1.0}};
  const GeometryPoint b{20.0, {1.2, 0.9, 1.1, 0.8}};
  CHECK(frequency_at(p, a) == doctest::Approx(frequency_at(p, b)).epsilon(1e-14));
}

TEST_CASE("geometry problem validation") {
  GeometryProblem p;
  p.baseline = make_design(25, 12, true);
  p.f_lo = 0.05;
  p.f_hi = 0.01;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.f_hi = 0.1;
  p.r_min = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("published frequency comparison") {
  const FrequencyComparison c = compare_frequency(kReferenceGeometry.frequency_hz, kReferenceGeometry.simulated_hz);
  CHECK(c.absolute_difference == doctest::Approx(0.00211).epsilon(1e-9));
  CHECK(std::round(c.relative_difference * 1e4) / 100.0 == 1.94);
  CHECK(c.relative_difference == doctest::Approx((0.1107 - 0.10859) / 0.10859).epsilon(1e-15));
}
