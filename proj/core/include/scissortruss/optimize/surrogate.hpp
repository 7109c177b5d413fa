#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "scissortruss/kinematics.hpp"
#include "scissortruss/optimize/ga.hpp"
#include "scissortruss/optimize/sqp.hpp"

namespace scissortruss {

/// Single-hidden-layer network t -> y: sum_k eta_k sigmoid(phi_k t + b_k) + b_out.
/// A block stores [phi (H), eta (H), b_hidden (H), b_out].
struct NetworkArchitecture {
  int hidden = 10;
  std::size_t block_size() const { return 3 * static_cast<std::size_t>(hidden) + 1; }
};

double sigmoid(double z);

/// Throws std::invalid_argument when the block length does not match `arch`.
double nn_forward(std::span<const double> block, double t, const NetworkArchitecture& arch);

/// The four curve models, in order: linear velocity, angular velocity,
/// linear acceleration, angular acceleration.
inline constexpr std::size_t kCurveCount = 4;
inline constexpr std::array<const char*, kCurveCount> kCurveNames{"LV", "AV", "LA", "AA"};

struct Chromosome {
  NetworkArchitecture arch;
  std::vector<double> weights;  // kCurveCount blocks back to back

  explicit Chromosome(NetworkArchitecture a = {});
  std::span<const double> block(std::size_t curve) const;
  std::span<double> block(std::size_t curve);
};

struct CurveDataset {
  std::vector<double> t;
  std::array<std::vector<double>, kCurveCount> curves;
};

/// Deployment curves of a unit at the given slider speed.
CurveDataset kinematic_dataset(const UnitGeometry& unit, double slider_speed, int steps = 100);

/// Time scaled to [0, 1]; each curve divided by its largest magnitude.
CurveDataset normalize_dataset(const CurveDataset& data);

/// Mean squared error of one block against a curve, and its gradient.
double block_mse(std::span<const double> block, const NetworkArchitecture& arch,
                 std::span<const double> t, std::span<const double> y);
Vector block_mse_gradient(std::span<const double> block, const NetworkArchitecture& arch,
                          std::span<const double> t, std::span<const double> y);

struct CurveFitRecord {
  double ga_fitness = 0.0;
  double refined_fitness = 0.0;
  int ga_generations = 0;
  int ga_function_evals = 0;
  int refine_iterations = 0;
  int refine_function_evals = 0;
  std::string refine_status;
};

/// One repetition of the pipeline (GA then SQP) across the four curves.
struct RunRecord {
  int run = 0;
  std::array<CurveFitRecord, kCurveCount> curves;
  double seconds = 0.0;  // wall time; not part of the persisted results
};

struct SurrogateFit {
  Chromosome best;
  std::array<double, kCurveCount> best_fitness{};
  std::array<int, kCurveCount> best_run{};
  std::vector<RunRecord> runs;
  std::array<std::vector<double>, kCurveCount> ga_traces;  // from the winning run
  std::vector<std::string> warnings;
};

struct SurrogateOptions {
  NetworkArchitecture arch;
  GAConfig ga;
  RefineConfig refine;
  int runs = 10;
  double weight_bound = 10.0;  // GA search box is [-bound, bound] per weight
};

/// Fits each curve independently: GA over the weight box, then sqp_refine
/// from the GA best. Keeps the best run per curve. Run r, curve i uses GA
/// seed `ga.seed + 4 r + i`.
SurrogateFit fit_kinematics_surrogate(const CurveDataset& data, const SurrogateOptions& opts);

}  // namespace scissortruss
