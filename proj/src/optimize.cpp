#include "cvlearn/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace cvlearn {

namespace {

struct Budget {
  long long used = 0;
  long long cap = 0;
  bool spent() const { return used >= cap; }
};

double eval_counted(const Objective& f, const Eigen::VectorXd& x, Budget& budget) {
  ++budget.used;
  const double v = f(x);
  return std::isfinite(v) ? v : 1e30;
}

void coordinate_descent(const Objective& f, Eigen::VectorXd& x, double& fx, double step,
                        Budget& budget) {
  const int dim = static_cast<int>(x.size());
  for (int pass = 0; pass < 3 && !budget.spent(); ++pass) {
    bool improved = false;
    for (int j = 0; j < dim && !budget.spent(); ++j) {
      double h = step;
      for (int probe = 0; probe < 6 && !budget.spent(); ++probe) {
        Eigen::VectorXd cand = x;
        cand(j) += h;
        const double fp = eval_counted(f, cand, budget);
        if (fp < fx) {
          x = cand;
          fx = fp;
          improved = true;
          h *= 1.6;  // keep walking while it pays
          continue;
        }
        cand(j) = x(j) - h;
        const double fm = eval_counted(f, cand, budget);
        if (fm < fx) {
          x = cand;
          fx = fm;
          improved = true;
          h *= 1.6;
          continue;
        }
        h *= 0.35;
        if (h < 1e-10) break;
      }
    }
    if (!improved) {
      step *= 0.3;
      if (step < 1e-10) break;
    }
  }
}

}  // namespace

OptimizerResult minimize(const Objective& f, const Eigen::VectorXd& x0,
                         const OptimizerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = static_cast<int>(x0.size());
  const int pop = std::max(cfg.population, 4);
  const int elites = std::max(pop / 4, 1);

  Budget budget{0, cfg.max_evals};
  const auto t0 = std::chrono::steady_clock::now();
  auto wall_spent = [&]() {
    if (cfg.max_wall_ms <= 0.0) return false;
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    return ms >= cfg.max_wall_ms;
  };
  OptimizerResult result;
  result.best = x0;
  result.best_value = eval_counted(f, x0, budget);
  result.trace.push_back(result.best_value);

  for (int restart = 0; restart <= cfg.restarts && !budget.spent(); ++restart) {
    Eigen::VectorXd mean = result.best;
    double sigma = cfg.init_step / (1.0 + restart);
    double prev_gen_best = result.best_value;
    int stall = 0;

    while (!budget.spent()) {
      if (wall_spent()) {
        result.wall_budget_hit = true;
        break;
      }
      std::vector<std::pair<double, Eigen::VectorXd>> gen;
      gen.reserve(pop);
      for (int i = 0; i < pop && !budget.spent(); ++i) {
        Eigen::VectorXd cand(dim);
        for (int j = 0; j < dim; ++j) cand(j) = mean(j) + sigma * gauss(rng);
        gen.emplace_back(eval_counted(f, cand, budget), std::move(cand));
      }
      if (gen.empty()) break;
      std::sort(gen.begin(), gen.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (gen.front().first < result.best_value) {
        result.best_value = gen.front().first;
        result.best = gen.front().second;
      }
      // Recombine the elite ranks.
      Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
      for (int e = 0; e < elites && e < static_cast<int>(gen.size()); ++e) {
        next += gen[e].second;
      }
      mean = next / std::min<int>(elites, static_cast<int>(gen.size()));

      // One-fifth style step control on generation-level progress.
      if (gen.front().first < prev_gen_best - 1e-14) {
        sigma *= 1.15;
        stall = 0;
      } else {
        sigma *= 0.7;
        ++stall;
      }
      prev_gen_best = gen.front().first;
      result.trace.push_back(result.best_value);
      if (result.best_value <= cfg.target_value) {
        result.converged = true;
        break;
      }
      if (sigma < 1e-9 || stall > 12) break;
    }
    if (result.converged || result.wall_budget_hit) break;
  }

  if (cfg.coordinate_refine && !budget.spent() && !result.converged &&
      !result.wall_budget_hit) {
    coordinate_descent(f, result.best, result.best_value, cfg.init_step * 0.2, budget);
    result.trace.push_back(result.best_value);
  }
  if (result.best_value <= cfg.target_value) result.converged = true;
  result.evals = budget.used;
  return result;
}

}  // namespace cvlearn
