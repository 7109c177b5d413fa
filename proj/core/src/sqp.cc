#include "scissortruss/optimize/sqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace scissortruss {

Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                        double rel_step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::string to_string(RefineStatus status) {
  switch (status) {
    case RefineStatus::kFitnessTarget:
      return "fitness_target";
    case RefineStatus::kStationary:
      return "stationary";
    case RefineStatus::kStepTolerance:
      return "step_tolerance";
    case RefineStatus::kFunctionTolerance:
      return "function_tolerance";
    case RefineStatus::kStagnated:
      return "stagnated";
    case RefineStatus::kMaxIterations:
      return "max_iterations";
    case RefineStatus::kMaxFunctionEvals:
      return "max_function_evals";
  }
  return "unknown";
}

QpSolution solve_inequality_qp(const Eigen::MatrixXd& hessian, const Vector& gradient,
                               const Eigen::MatrixXd& jacobian, const Vector& values) {
  const auto n = gradient.size();
  const auto m = values.size();
  if (m > 20) throw std::invalid_argument("active-set enumeration limited to 20 constraints");

  QpSolution best;
  const double scale = 1.0 + gradient.cwiseAbs().maxCoeff() +
                       (m > 0 ? values.cwiseAbs().maxCoeff() : 0.0);
  const double eps = 1e-11 * scale;

  // The QP is strictly convex, so the first active set passing the KKT
  // checks is the solution; smaller sets are tried first.
  std::vector<int> active;
  for (Eigen::Index k = 0; k <= m; ++k) {
    active.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) active[static_cast<std::size_t>(i)] = static_cast<int>(i);
    while (true) {
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
      Vector rhs(n + k);
      kkt.topLeftCorner(n, n) = hessian;
      rhs.head(n) = -gradient;
      for (Eigen::Index a = 0; a < k; ++a) {
        const int row = active[static_cast<std::size_t>(a)];
        kkt.block(0, n + a, n, 1) = -jacobian.row(row).transpose();
        kkt.block(n + a, 0, 1, n) = jacobian.row(row);
        rhs[n + a] = -values[row];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (lu.isInvertible()) {
        const Vector sol = lu.solve(rhs);
        const Vector d = sol.head(n);
        const Vector lam = sol.tail(k);
        bool ok = (k == 0) || lam.minCoeff() >= -eps;
        if (ok && m > 0) ok = (values + jacobian * d).minCoeff() >= -eps;
        if (ok) {
          best.step = d;
          best.multipliers = Vector::Zero(m);
          for (Eigen::Index a = 0; a < k; ++a) {
            best.multipliers[active[static_cast<std::size_t>(a)]] = std::max(0.0, lam[a]);
          }
          best.feasible = true;
          return best;
        }
      }
      // Next k-combination of [0, m).
      Eigen::Index pos = k - 1;
      while (pos >= 0 && active[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
      if (pos < 0) break;
      ++active[static_cast<std::size_t>(pos)];
      for (Eigen::Index i = pos + 1; i < k; ++i) {
        active[static_cast<std::size_t>(i)] = active[static_cast<std::size_t>(i - 1)] + 1;
      }
    }
  }
  best.step = Vector::Zero(n);
  best.multipliers = Vector::Zero(m);
  best.feasible = false;
  return best;
}

namespace {

class Evaluator {
 public:
  Evaluator(const ScalarFunction& objective, const std::vector<ScalarFunction>& constraints)
      : objective_(objective), constraints_(constraints) {}

  double value(const Vector& x) {
    ++evals_;
    return objective_.value(x);
  }

  Vector gradient(const Vector& x) { return grad_of(objective_, x); }

  Vector constraint_values(const Vector& x) {
    Vector c(static_cast<Eigen::Index>(constraints_.size()));
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] = constraints_[i].value(x);
    }
    return c;
  }

  Eigen::MatrixXd jacobian(const Vector& x) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(constraints_.size()), x.size());
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      j.row(static_cast<Eigen::Index>(i)) = grad_of(constraints_[i], x).transpose();
    }
    return j;
  }

  int evals() const { return evals_; }

 private:
  Vector grad_of(const ScalarFunction& f, const Vector& x) {
    if (f.gradient) {
      ++evals_;
      return f.gradient(x);
    }
    evals_ += 2 * static_cast<int>(x.size());
    return central_gradient(f.value, x);
  }

  const ScalarFunction& objective_;
  const std::vector<ScalarFunction>& constraints_;
  int evals_ = 0;
};

double violation(const Vector& c) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) v = std::max(v, -c[i]);
  return v;
}

double total_violation(const Vector& c) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) v += std::max(0.0, -c[i]);
  return v;
}

}  // namespace

RefineResult sqp_refine(const ScalarFunction& objective, const Vector& x0,
                        const std::vector<ScalarFunction>& constraints,
                        const RefineConfig& config) {
  if (!objective.value) throw std::invalid_argument("objective has no value function");
  if (config.max_function_evals < 1) throw std::invalid_argument("max_function_evals must be >= 1");

  Evaluator eval(objective, constraints);
  const auto n = x0.size();
  const double mach = std::numeric_limits<double>::epsilon();

  RefineResult res;
  Vector x = x0;
  double f = eval.value(x);
  Vector g = eval.gradient(x);
  Vector c = eval.constraint_values(x);
  Eigen::MatrixXd jac = eval.jacobian(x);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
  Vector lambda = Vector::Zero(c.size());
  double penalty = 1.0;
  bool feasible_mode = config.feasible_iterates && violation(c) <= config.tol_con;
  bool scaled = false;
  int flat_steps = 0;
  res.objective_trace.push_back(f);

  const auto finish = [&](RefineStatus status, bool converged) {
    res.status = status;
    res.converged = converged;
  };

  res.status = RefineStatus::kMaxIterations;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    const double viol = violation(c);
    if (f <= config.fitness_target && viol <= config.tol_con) {
      finish(RefineStatus::kFitnessTarget, true);
      break;
    }
    if (eval.evals() >= config.max_function_evals) {
      finish(RefineStatus::kMaxFunctionEvals, false);
      break;
    }

    QpSolution qp = solve_inequality_qp(hess, g, jac, c);
    if (!qp.feasible) {
      // Inconsistent linearisation: loosen the violated rows step by step.
      Vector relaxed = c;
      for (int attempt = 0; attempt < 60 && !qp.feasible; ++attempt) {
        for (Eigen::Index i = 0; i < relaxed.size(); ++i) {
          if (relaxed[i] < 0.0) relaxed[i] = attempt < 50 ? 0.5 * relaxed[i] : 1e300;
        }
        qp = solve_inequality_qp(hess, g, jac, relaxed);
      }
      res.log.push_back("iteration " + std::to_string(iter) + ": relaxed inconsistent QP");
    }
    const Vector d = qp.step;
    lambda = qp.multipliers;
    const Vector grad_lag = g - jac.transpose() * lambda;
    res.stationarity = grad_lag.cwiseAbs().maxCoeff();
    if (viol <= config.tol_con && res.stationarity == 0.0) {
      finish(RefineStatus::kStationary, true);
      break;
    }
    if (viol <= config.tol_con &&
        d.cwiseAbs().maxCoeff() <= config.tol_x * (1.0 + x.cwiseAbs().maxCoeff())) {
      finish(RefineStatus::kStepTolerance, true);
      break;
    }

    if (lambda.size() > 0) penalty = std::max(penalty, 1.5 * lambda.maxCoeff() + 1e-8);
    const double slope = g.dot(d);
    const double merit0 = f + penalty * total_violation(c);
    const double merit_slope = slope - penalty * total_violation(c);

    double alpha = 1.0;
    bool accepted = false;
    Vector xt;
    double ft = f;
    Vector ct;
    while (alpha > 1e-20 && eval.evals() < config.max_function_evals) {
      xt = x + alpha * d;
      ft = eval.value(xt);
      ct = eval.constraint_values(xt);
      if (std::isfinite(ft)) {
        if (feasible_mode) {
          accepted = violation(ct) <= config.tol_con &&
                     ft <= f + 1e-4 * alpha * std::min(slope, 0.0);
        } else {
          accepted = ft + penalty * total_violation(ct) <=
                     merit0 + 1e-4 * alpha * std::min(merit_slope, 0.0);
        }
      }
      if (accepted) break;
      alpha *= 0.5;
    }
    if (!accepted) {
      if (eval.evals() >= config.max_function_evals) {
        finish(RefineStatus::kMaxFunctionEvals, false);
      } else {
        res.log.push_back("iteration " + std::to_string(iter) +
                          ": line search stalled at machine precision");
        finish(RefineStatus::kStagnated, true);
      }
      break;
    }

    const Vector g_new = eval.gradient(xt);
    const Eigen::MatrixXd jac_new = eval.jacobian(xt);
    const Vector s = xt - x;
    Vector y = (g_new - jac_new.transpose() * lambda) - grad_lag;

    // Damped BFGS keeps the Hessian model positive definite.
    double sy = s.dot(y);
    if (!scaled && sy > 0.0) {
      hess = (y.squaredNorm() / sy) * Eigen::MatrixXd::Identity(n, n);
      scaled = true;
    }
    const Vector bs = hess * s;
    const double sbs = s.dot(bs);
    if (sbs > 0.0) {
      if (sy < 0.2 * sbs) {
        const double theta = 0.8 * sbs / (sbs - sy);
        y = theta * y + (1.0 - theta) * bs;
        sy = s.dot(y);
      }
      if (sy > 0.0) hess += (y * y.transpose()) / sy - (bs * bs.transpose()) / sbs;
    }

    const double df = f - ft;
    x = xt;
    f = ft;
    g = g_new;
    c = ct;
    jac = jac_new;
    res.objective_trace.push_back(f);
    if (!feasible_mode && config.feasible_iterates && violation(c) <= config.tol_con) {
      feasible_mode = true;
    }

    const bool feasible_now = violation(c) <= config.tol_con;
    if (feasible_now && std::abs(df) <= config.tol_fun * (1.0 + std::abs(f)) &&
        s.cwiseAbs().maxCoeff() <= config.tol_x * (1.0 + x.cwiseAbs().maxCoeff())) {
      finish(RefineStatus::kFunctionTolerance, true);
      ++iter;
      break;
    }
    // Relative to f itself: small residual objectives keep improving far below 1.
    flat_steps = std::abs(df) <= 4.0 * mach * std::abs(f) ? flat_steps + 1 : 0;
    if (flat_steps >= 5) {
      res.log.push_back("iteration " + std::to_string(iter) +
                        ": objective stagnated at machine precision");
      finish(RefineStatus::kStagnated, true);
      ++iter;
      break;
    }
  }
  if (iter >= config.max_iterations && res.status == RefineStatus::kMaxIterations) {
    res.converged = false;
  }

  res.x = x;
  res.objective = f;
  res.max_violation = violation(c);
  res.multipliers = lambda;
  res.iterations = iter;
  res.function_evals = eval.evals();
  res.stationarity = (g - jac.transpose() * lambda).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace scissortruss
