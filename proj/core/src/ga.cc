#include "scissortruss/optimize/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace scissortruss {

void GAConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population size must be >= 2");
  if (generations < 0) throw std::invalid_argument("generation limit must be >= 0");
  if (stall_generation_limit < 1) throw std::invalid_argument("stall limit must be >= 1");
  if (elite_count < 0 || elite_count >= population_size) {
    throw std::invalid_argument("elite count must lie in [0, population size)");
  }
  if (tournament_size < 1) throw std::invalid_argument("tournament size must be >= 1");
  for (double r : {crossover_rate, mutation_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rates must lie in [0, 1]");
  }
  if (!(mutation_scale >= 0.0)) throw std::invalid_argument("mutation scale must be >= 0");
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
}

std::string to_string(GAStop stop) {
  switch (stop) {
    case GAStop::kFitnessTarget:
      return "fitness_target";
    case GAStop::kGenerations:
      return "generations";
    case GAStop::kStall:
      return "stall";
  }
  return "unknown";
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, int generation, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

struct Individual {
  Vector genes;
  double fitness = std::numeric_limits<double>::infinity();
};

void evaluate(const std::function<double(const Vector&)>& fitness,
              std::vector<Individual>& pop, std::size_t first, int threads) {
  const std::size_t count = pop.size() - first;
  const auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) pop[i].fitness = fitness(pop[i].genes);
  };
  if (threads <= 1 || count < 2) {
    work(first, pop.size());
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = first + w * chunk;
    const std::size_t hi = std::min(pop.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(work, lo, hi);
  }
}

}  // namespace

GAResult ga_optimize(const std::function<double(const Vector&)>& fitness, const Bounds& bounds,
                     const GAConfig& config) {
  config.validate();
  const auto dim = bounds.lower.size();
  if (dim == 0 || bounds.upper.size() != dim) throw std::invalid_argument("bad bounds");
  if ((bounds.upper - bounds.lower).minCoeff() < 0.0) {
    throw std::invalid_argument("upper bound below lower bound");
  }
  const Vector width = bounds.upper - bounds.lower;
  const auto pop_size = static_cast<std::size_t>(config.population_size);

  GAResult res;
  const auto sanitize = [&](std::vector<Individual>& pop, std::size_t first) {
    for (std::size_t i = first; i < pop.size(); ++i) {
      if (!std::isfinite(pop[i].fitness)) {
        pop[i].fitness = std::numeric_limits<double>::infinity();
        ++res.rejected;
        if (res.log.size() < 20) res.log.push_back("rejected candidate with non-finite fitness");
      }
    }
  };
  const auto by_fitness = [](const Individual& a, const Individual& b) {
    return a.fitness < b.fitness;
  };

  std::vector<Individual> pop(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    auto rng = stream(config.seed, 0, static_cast<int>(i));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    pop[i].genes.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) pop[i].genes[k] = bounds.lower[k] + u(rng) * width[k];
  }
  evaluate(fitness, pop, 0, config.threads);
  res.function_evals += static_cast<int>(pop_size);
  sanitize(pop, 0);
  std::stable_sort(pop.begin(), pop.end(), by_fitness);

  Individual best = pop.front();
  res.trace.push_back(best.fitness);
  res.stop = GAStop::kGenerations;
  int stall = 0;
  int gen = 0;

  while (true) {
    if (best.fitness <= config.fitness_target) {
      res.stop = GAStop::kFitnessTarget;
      break;
    }
    if (gen >= config.generations) {
      res.stop = GAStop::kGenerations;
      break;
    }
    if (stall >= config.stall_generation_limit) {
      res.stop = GAStop::kStall;
      break;
    }
    ++gen;

    const double shrink =
        config.generations > 0
            ? std::max(0.0, 1.0 - config.mutation_shrink * (gen - 1) / config.generations)
            : 1.0;
    std::vector<Individual> next;
    next.reserve(pop_size);
    for (std::size_t e = 0; e < static_cast<std::size_t>(config.elite_count); ++e) {
      next.push_back(pop[e]);
    }
    const std::size_t first_child = next.size();
    for (std::size_t i = first_child; i < pop_size; ++i) {
      auto rng = stream(config.seed, gen, static_cast<int>(i));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
      std::normal_distribution<double> normal(0.0, 1.0);
      const auto tournament = [&]() -> const Individual& {
        std::size_t winner = pick(rng);
        for (int t = 1; t < config.tournament_size; ++t) {
          const std::size_t challenger = pick(rng);
          if (pop[challenger].fitness < pop[winner].fitness) winner = challenger;
        }
        return pop[winner];
      };
      const Individual& a = tournament();
      const Individual& b = tournament();
      Individual child;
      child.genes = a.genes;
      if (u(rng) < config.crossover_rate) {
        for (Eigen::Index k = 0; k < dim; ++k) {
          if (u(rng) < 0.5) child.genes[k] = b.genes[k];
        }
      }
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (u(rng) < config.mutation_rate) {
          child.genes[k] += normal(rng) * config.mutation_scale * shrink * width[k];
          child.genes[k] = std::clamp(child.genes[k], bounds.lower[k], bounds.upper[k]);
        }
      }
      next.push_back(std::move(child));
    }
    evaluate(fitness, next, first_child, config.threads);
    res.function_evals += static_cast<int>(pop_size - first_child);
    sanitize(next, first_child);
    std::stable_sort(next.begin(), next.end(), by_fitness);
    pop = std::move(next);

    const double improvement = best.fitness - pop.front().fitness;
    if (pop.front().fitness < best.fitness) best = pop.front();
    stall = (improvement > config.tol_fun) ? 0 : stall + 1;
    res.trace.push_back(best.fitness);
  }

  res.best = best.genes;
  res.best_fitness = best.fitness;
  res.generations = gen;
  return res;
}

}  // namespace scissortruss
