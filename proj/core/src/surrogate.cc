#include "scissortruss/optimize/surrogate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace scissortruss {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double nn_forward(std::span<const double> block, double t, const NetworkArchitecture& arch) {
  if (block.size() != arch.block_size()) {
    throw std::invalid_argument("weight block has " + std::to_string(block.size()) +
                                " entries, architecture needs " +
                                std::to_string(arch.block_size()));
  }
  const auto h = static_cast<std::size_t>(arch.hidden);
  const double* phi = block.data();
  const double* eta = phi + h;
  const double* bias = eta + h;
  double out = bias[h];
  for (std::size_t k = 0; k < h; ++k) out += eta[k] * sigmoid(phi[k] * t + bias[k]);
  return out;
}

Chromosome::Chromosome(NetworkArchitecture a)
    : arch(a), weights(kCurveCount * a.block_size(), 0.0) {}

std::span<const double> Chromosome::block(std::size_t curve) const {
  return std::span<const double>(weights).subspan(curve * arch.block_size(), arch.block_size());
}

std::span<double> Chromosome::block(std::size_t curve) {
  return std::span<double>(weights).subspan(curve * arch.block_size(), arch.block_size());
}

CurveDataset kinematic_dataset(const UnitGeometry& unit, double slider_speed, int steps) {
  const DeploymentProfile profile =
      deployment_profile(unit, slider_speed, DeployDirection::kDeploy, steps);
  const KinematicCurves c = kinematic_curves(profile);
  CurveDataset d;
  d.t = c.time;
  d.curves = {c.linear_velocity, c.angular_velocity, c.linear_acceleration,
              c.angular_acceleration};
  return d;
}

CurveDataset normalize_dataset(const CurveDataset& data) {
  CurveDataset out = data;
  if (data.t.empty()) return out;
  const double t_max = *std::max_element(data.t.begin(), data.t.end());
  const double t_min = *std::min_element(data.t.begin(), data.t.end());
  const double span = t_max - t_min;
  for (double& t : out.t) t = span > 0.0 ? (t - t_min) / span : 0.0;
  for (auto& curve : out.curves) {
    double peak = 0.0;
    for (double v : curve) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
      for (double& v : curve) v /= peak;
    }
  }
  return out;
}

double block_mse(std::span<const double> block, const NetworkArchitecture& arch,
                 std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.empty()) throw std::invalid_argument("bad curve samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = nn_forward(block, t[i], arch) - y[i];
    sum += e * e;
  }
  return sum / static_cast<double>(t.size());
}

Vector block_mse_gradient(std::span<const double> block, const NetworkArchitecture& arch,
                          std::span<const double> t, std::span<const double> y) {
  if (block.size() != arch.block_size()) throw std::invalid_argument("weight block size mismatch");
  if (t.size() != y.size() || t.empty()) throw std::invalid_argument("bad curve samples");
  const auto h = static_cast<std::size_t>(arch.hidden);
  const double* phi = block.data();
  const double* eta = phi + h;
  const double* bias = eta + h;
  Vector g = Vector::Zero(static_cast<Eigen::Index>(block.size()));
  std::vector<double> s(h);
  const double scale = 2.0 / static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double out = bias[h];
    for (std::size_t k = 0; k < h; ++k) {
      s[k] = sigmoid(phi[k] * t[i] + bias[k]);
      out += eta[k] * s[k];
    }
    const double e = scale * (out - y[i]);
    for (std::size_t k = 0; k < h; ++k) {
      const double ds = eta[k] * s[k] * (1.0 - s[k]);
      const auto kk = static_cast<Eigen::Index>(k);
      const auto hh = static_cast<Eigen::Index>(h);
      g[kk] += e * ds * t[i];
      g[hh + kk] += e * s[k];
      g[2 * hh + kk] += e * ds;
    }
    g[static_cast<Eigen::Index>(3 * h)] += e;
  }
  return g;
}

SurrogateFit fit_kinematics_surrogate(const CurveDataset& data, const SurrogateOptions& opts) {
  if (data.t.empty()) throw std::invalid_argument("surrogate dataset is empty");
  for (const auto& curve : data.curves) {
    if (curve.size() != data.t.size()) throw std::invalid_argument("curves must share the time grid");
  }
  if (opts.runs < 1) throw std::invalid_argument("need at least one run");
  const NetworkArchitecture arch = opts.arch;
  const std::size_t nb = arch.block_size();

  SurrogateFit fit;
  fit.best = Chromosome(arch);
  fit.best_fitness.fill(std::numeric_limits<double>::infinity());
  if (data.t.size() < nb) {
    fit.warnings.push_back("underdetermined fit: " + std::to_string(data.t.size()) +
                           " samples for " + std::to_string(nb) + " weights per curve");
  }

  Bounds box{Vector::Constant(static_cast<Eigen::Index>(nb), -opts.weight_bound),
             Vector::Constant(static_cast<Eigen::Index>(nb), opts.weight_bound)};

  for (int r = 0; r < opts.runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord record;
    record.run = r;
    for (std::size_t c = 0; c < kCurveCount; ++c) {
      const std::span<const double> t(data.t);
      const std::span<const double> y(data.curves[c]);
      const auto as_span = [](const Vector& w) {
        return std::span<const double>(w.data(), static_cast<std::size_t>(w.size()));
      };
      const auto mse = [&](const Vector& w) { return block_mse(as_span(w), arch, t, y); };

      GAConfig ga = opts.ga;
      ga.seed = opts.ga.seed + 4ULL * static_cast<std::uint64_t>(r) + c;
      const GAResult global = ga_optimize(mse, box, ga);

      ScalarFunction objective{
          mse, [&](const Vector& w) { return block_mse_gradient(as_span(w), arch, t, y); }};
      const RefineResult local = sqp_refine(objective, global.best, {}, opts.refine);

      // The refinement starts at the GA best and only accepts descent steps.
      const bool use_local = local.objective <= global.best_fitness;
      const Vector& w = use_local ? local.x : global.best;
      const double value = use_local ? local.objective : global.best_fitness;

      CurveFitRecord& rec = record.curves[c];
      rec.ga_fitness = global.best_fitness;
      rec.refined_fitness = value;
      rec.ga_generations = global.generations;
      rec.ga_function_evals = global.function_evals;
      rec.refine_iterations = local.iterations;
      rec.refine_function_evals = local.function_evals;
      rec.refine_status = to_string(local.status);

      if (value < fit.best_fitness[c]) {
        fit.best_fitness[c] = value;
        fit.best_run[c] = r;
        std::copy(w.data(), w.data() + w.size(), fit.best.block(c).begin());
        fit.ga_traces[c] = global.trace;
      }
    }
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fit.runs.push_back(record);
  }
  return fit;
}

}  // namespace scissortruss
