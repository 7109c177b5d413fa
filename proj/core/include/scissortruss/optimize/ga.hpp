#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scissortruss {

using Vector = Eigen::VectorXd;

/// Real-coded genetic algorithm settings. Tolerance and target defaults are
/// kept at the values of the original run script even where they sit below
/// double resolution; the stall counter ends such runs instead.
struct GAConfig {
  int population_size = 30;
  int generations = 20;
  int stall_generation_limit = 100;
  double fitness_target = 1e-20;
  double tol_con = 1e-20;
  double tol_fun = 1e-18;
  int elite_count = 2;
  int tournament_size = 2;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;   // per-gene probability
  double mutation_scale = 0.1;  // Gaussian sigma as a fraction of the bound width
  double mutation_shrink = 1.0; // sigma shrinks linearly to (1 - shrink) by the last generation
  std::uint64_t seed = 20240521;
  int threads = 1;  // fitness evaluation workers; results do not depend on it

  void validate() const;
};

struct Bounds {
  Vector lower;
  Vector upper;
};

enum class GAStop { kFitnessTarget, kGenerations, kStall };

std::string to_string(GAStop stop);

struct GAResult {
  Vector best;
  double best_fitness = 0.0;
  std::vector<double> trace;  // best-so-far fitness after each generation (index 0 = initial)
  int generations = 0;
  int function_evals = 0;
  int rejected = 0;  // candidates whose fitness was not finite
  GAStop stop = GAStop::kGenerations;
  std::vector<std::string> log;
};

/// Minimises `fitness` over the box `bounds`. Tournament selection, uniform
/// crossover, Gaussian mutation and elitism. Every random draw comes from a
/// stream keyed by (seed, generation, individual), so runs are reproducible
/// and independent of `threads`.
GAResult ga_optimize(const std::function<double(const Vector&)>& fitness, const Bounds& bounds,
                     const GAConfig& config);

}  // namespace scissortruss
