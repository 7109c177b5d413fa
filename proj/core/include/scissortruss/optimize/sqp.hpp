#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scissortruss {

using Vector = Eigen::VectorXd;

/// Smooth scalar function with an optional analytic gradient. Without one the
/// solver falls back to central differences.
struct ScalarFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Central-difference gradient with a step relative to |x_i|.
Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                        double rel_step = 1e-6);

struct RefineConfig {
  double fitness_target = 1e-18;
  double tol_x = 1e-22;
  double tol_fun = 1e-22;
  double tol_con = 1e-22;
  int max_function_evals = 200000;
  int max_iterations = 1000;
  // Once an iterate is feasible, later iterates must stay feasible and not
  // increase the objective.
  bool feasible_iterates = true;
};

enum class RefineStatus {
  kFitnessTarget,
  kStationary,
  kStepTolerance,
  kFunctionTolerance,
  kStagnated,
  kMaxIterations,
  kMaxFunctionEvals,
};

std::string to_string(RefineStatus status);

struct RefineResult {
  Vector x;
  double objective = 0.0;
  double max_violation = 0.0;
  double stationarity = 0.0;  // |grad L|_inf at the returned point
  Vector multipliers;
  int iterations = 0;
  int function_evals = 0;
  bool converged = false;
  RefineStatus status = RefineStatus::kMaxIterations;
  std::vector<double> objective_trace;  // objective at x0 and each accepted iterate
  std::vector<std::string> log;
};

/// Minimises `objective` subject to c_i(x) >= 0 with a damped-BFGS SQP
/// method and an L1 merit line search. Unconstrained problems reduce to a
/// quasi-Newton descent. Hitting an evaluation or iteration cap returns the
/// best iterate with `converged` unset.
RefineResult sqp_refine(const ScalarFunction& objective, const Vector& x0,
                        const std::vector<ScalarFunction>& constraints,
                        const RefineConfig& config = {});

/// Solution of min 1/2 d'Bd + g'd s.t. c + J d >= 0 for small constraint
/// counts (exact active-set enumeration). `feasible` is false when the
/// linearisation admits no point.
struct QpSolution {
  Vector step;
  Vector multipliers;
  bool feasible = false;
};

QpSolution solve_inequality_qp(const Eigen::MatrixXd& hessian, const Vector& gradient,
                               const Eigen::MatrixXd& jacobian, const Vector& values);

}  // namespace scissortruss
