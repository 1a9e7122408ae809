#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cvlearn {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizerConfig {
  int population = 24;
  long long max_evals = 6000;
  int restarts = 2;
  double init_step = 0.5;
  std::uint64_t seed = 1;
  bool coordinate_refine = true;
  double target_value = -1e300;  // stop early when reached
  double max_wall_ms = 0.0;      // > 0: stop gracefully at the wall budget
};

struct OptimizerResult {
  Eigen::VectorXd best;
  double best_value = 0.0;
  long long evals = 0;
  bool converged = false;          // target reached or step collapsed
  bool wall_budget_hit = false;
  std::vector<double> trace;       // best value after each generation
};

/// Rank-selection evolution strategy with step adaptation and restarts,
/// followed by per-coordinate bracketing descent. Deterministic per seed.
OptimizerResult minimize(const Objective& f, const Eigen::VectorXd& x0,
                         const OptimizerConfig& cfg);

}  // namespace cvlearn
