#include "cvlearn/dims.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cvlearn/gaussian.hpp"
#include "cvlearn/ggstate.hpp"
#include "cvlearn/learn.hpp"
#include "cvlearn/optimize.hpp"
#include "cvlearn/photocount.hpp"

namespace cvlearn {

FunctionClassHandle constant_class_handle() {
  FunctionClassHandle h;
  h.eval = [](const Eigen::VectorXd& theta, const Eigen::VectorXd&) {
    return std::clamp(theta(0), 0.0, 1.0);
  };
  h.param_dim = 1;
  h.input_dim = 1;
  h.tag = "constant";
  return h;
}

FunctionClassHandle displacement_only_handle() {
  FunctionClassHandle h;
  h.eval = [](const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    GaussianState st = vacuum_state(1);
    st.mean = theta;
    return gaussian_effect_probability(st, identity_channel(1), heterodyne_effect(x));
  };
  h.param_dim = 2;
  h.input_dim = 2;
  h.tag = "f_g/displacement";
  h.param_range = 3.0;
  h.input_range = 3.0;
  return h;
}

FunctionClassHandle gaussian_state_class_handle(int n) {
  FunctionClassHandle h;
  const int dim = HypothesisParam::param_dim(HypothesisClass::gaussian_state, n);
  h.eval = [n](const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    HypothesisParam hyp;
    hyp.cls = HypothesisClass::gaussian_state;
    hyp.n = n;
    hyp.theta = theta;
    const GaussianState st = decode_state(hyp);
    if (!validate_state(st).ok) return 0.0;
    return gaussian_effect_probability(st, identity_channel(n), heterodyne_effect(x));
  };
  h.param_dim = dim;
  h.input_dim = 2 * n;
  h.tag = "f_g";
  h.param_range = 1.5;
  h.input_range = 2.5;
  return h;
}

FunctionClassHandle cat_family_handle() {
  FunctionClassHandle h;
  h.eval = [](const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    const Complex alpha(0.3 + std::abs(theta(0)), theta(1));
    const GGState cat = make_cat_state(alpha, CatSign::plus);
    return gg_outcome_probability(cat, gg_from_channel(identity_channel(1)),
                                  gg_from_effect(heterodyne_effect(x)));
  };
  h.param_dim = 2;
  h.input_dim = 2;
  h.tag = "f_gg/cat";
  h.param_range = 1.5;
  h.input_range = 3.0;
  return h;
}

FunctionClassHandle photocount_class_handle(int max_photons) {
  FunctionClassHandle h;
  h.eval = [max_photons](const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
    HypothesisParam hyp;
    hyp.cls = HypothesisClass::gaussian_state;
    hyp.n = 1;
    hyp.theta = theta;
    const GaussianState st = decode_state(hyp);
    if (!validate_state(st).ok) return 0.0;
    // Probe coordinates pick the counted photon number and the loss level.
    const int k = std::clamp(static_cast<int>(std::lround(std::abs(x(0)))), 0, max_photons);
    const double eta = 1.0 / (1.0 + std::exp(-x(1)));
    GaussianChannel loss;
    loss.disp = VectorXd::Zero(2);
    loss.x_mat = std::sqrt(eta) * MatrixXd::Identity(2, 2);
    loss.y_mat = 0.5 * (1.0 - eta) * MatrixXd::Identity(2, 2);
    return gp_outcome_probability(st, loss, HermiteIndex{{k}});
  };
  h.param_dim = HypothesisParam::param_dim(HypothesisClass::gaussian_state, 1);
  h.input_dim = 2;
  h.tag = "f_gp";
  h.param_range = 1.5;
  h.input_range = 4.0;
  return h;
}

bool verify_certificate(const FunctionClassHandle& handle, const ShatterCertificate& cert) {
  const int k = static_cast<int>(cert.inputs.size());
  if (static_cast<int>(cert.witnesses.size()) != (1 << k)) return false;
  for (int pattern = 0; pattern < (1 << k); ++pattern) {
    for (int i = 0; i < k; ++i) {
      const double v = handle.eval(cert.witnesses[pattern], cert.inputs[i]);
      const bool want_high = (pattern >> i) & 1;
      const double margin = want_high ? v - cert.thresholds[i] : cert.thresholds[i] - v;
      if (margin < cert.gamma - 1e-12) return false;
    }
  }
  return true;
}

namespace {

struct PatternSolve {
  Eigen::VectorXd witness;
  Eigen::VectorXd values;  // f(witness, x_i)
  double margin = -1e300;
};

}  // namespace

FatShatteringResult fat_shattering_lower_bound(const FunctionClassHandle& handle, double gamma,
                                               int k_max, long long budget, std::uint64_t seed) {
  if (k_max > 12) k_max = 12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-handle.input_range, handle.input_range);

  FatShatteringResult result;
  long long used = 0;

  std::vector<Eigen::VectorXd> base_inputs;  // carried over from the last success

  for (int k = 1; k <= k_max; ++k) {
    bool certified = false;
    const int attempts = 6;
    for (int attempt = 0; attempt < attempts && !certified; ++attempt) {
      if (used >= budget) break;
      // Probe candidates: extend the last certified set by fresh points.
      std::vector<Eigen::VectorXd> inputs = base_inputs;
      while (static_cast<int>(inputs.size()) > k - 1) inputs.pop_back();
      while (static_cast<int>(inputs.size()) < k) {
        Eigen::VectorXd x(handle.input_dim);
        for (int j = 0; j < handle.input_dim; ++j) x(j) = ux(rng);
        inputs.push_back(x);
      }

      const int patterns = 1 << k;
      std::vector<double> thresholds(k, 0.5 * (handle.out_lo + handle.out_hi));
      std::vector<PatternSolve> solves(patterns);
      const long long per_pattern =
          std::max<long long>(60, budget / (8LL * attempts * patterns * k_max));

      bool feasible = true;
      for (int round = 0; round < 2 && feasible; ++round) {
        for (int pattern = 0; pattern < patterns; ++pattern) {
          auto objective = [&](const Eigen::VectorXd& theta) {
            double worst = 1e300;
            for (int i = 0; i < k; ++i) {
              const double v = handle.eval(theta, inputs[i]);
              const bool want_high = (pattern >> i) & 1;
              const double margin = want_high ? v - thresholds[i] : thresholds[i] - v;
              worst = std::min(worst, margin);
            }
            return -worst;  // maximize the worst margin
          };
          OptimizerConfig ocfg;
          ocfg.max_evals = per_pattern;
          ocfg.population = 16;
          ocfg.restarts = 1;
          ocfg.init_step = 0.6 * handle.param_range;
          ocfg.seed = seed ^ (0x100 * (k + 1) + 0x10000ULL * attempt + pattern + round);
          ocfg.target_value = -(gamma * 1.25);  // stop once safely above margin
          Eigen::VectorXd x0 = solves[pattern].witness.size()
                                   ? solves[pattern].witness
                                   : Eigen::VectorXd::Zero(handle.param_dim);
          const OptimizerResult opt = minimize(objective, x0, ocfg);
          used += opt.evals;
          solves[pattern].witness = opt.best;
          solves[pattern].margin = -opt.best_value;
          solves[pattern].values.resize(k);
          for (int i = 0; i < k; ++i) {
            solves[pattern].values(i) = handle.eval(opt.best, inputs[i]);
          }
          if (solves[pattern].margin < -0.5 * (handle.out_hi - handle.out_lo)) {
            feasible = false;
            break;
          }
        }
        if (!feasible) break;
        // Joint threshold update: center each threshold inside the gap the
        // witnesses leave for it.
        for (int i = 0; i < k; ++i) {
          double lowest_high = 1e300, highest_low = -1e300;
          for (int pattern = 0; pattern < patterns; ++pattern) {
            if ((pattern >> i) & 1) {
              lowest_high = std::min(lowest_high, solves[pattern].values(i));
            } else {
              highest_low = std::max(highest_low, solves[pattern].values(i));
            }
          }
          thresholds[i] = 0.5 * (lowest_high + highest_low);
        }
      }
      if (!feasible) continue;

      ShatterCertificate cert;
      cert.inputs = inputs;
      cert.thresholds = thresholds;
      cert.gamma = gamma;
      cert.witnesses.resize(patterns);
      double worst = 1e300;
      for (int pattern = 0; pattern < patterns; ++pattern) {
        cert.witnesses[pattern] = solves[pattern].witness;
        for (int i = 0; i < k; ++i) {
          const bool want_high = (pattern >> i) & 1;
          const double margin = want_high ? solves[pattern].values(i) - thresholds[i]
                                          : thresholds[i] - solves[pattern].values(i);
          worst = std::min(worst, margin);
        }
      }
      cert.worst_margin = worst;
      if (worst >= gamma && verify_certificate(handle, cert)) {
        result.k_certified = k;
        result.certificate = cert;
        base_inputs = inputs;
        certified = true;
      }
    }
    if (!certified) break;
    if (used >= budget) {
      result.budget_exhausted = true;
      break;
    }
  }
  result.evals_used = used;
  return result;
}

CoverEstimate covering_number_estimate(const FunctionClassHandle& handle, double eps, int k,
                                       int sample_budget, std::uint64_t seed,
                                       CoverMetric metric) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-handle.input_range, handle.input_range);
  std::uniform_real_distribution<double> up(-handle.param_range, handle.param_range);

  std::vector<Eigen::VectorXd> inputs(k);
  for (auto& x : inputs) {
    x.resize(handle.input_dim);
    for (int j = 0; j < handle.input_dim; ++j) x(j) = ux(rng);
  }

  std::vector<Eigen::VectorXd> points;
  points.reserve(sample_budget);
  for (int s = 0; s < sample_budget; ++s) {
    Eigen::VectorXd theta(handle.param_dim);
    for (int j = 0; j < handle.param_dim; ++j) theta(j) = up(rng);
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = handle.eval(theta, inputs[i]);
    points.push_back(std::move(v));
  }

  auto dist = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (metric == CoverMetric::euclidean) {
      return std::sqrt((a - b).squaredNorm() / k);
    }
    return (a - b).cwiseAbs().sum() / k;
  };

  std::vector<int> centers;
  std::vector<bool> covered(points.size(), false);
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (covered[p]) continue;
    centers.push_back(static_cast<int>(p));
    for (std::size_t q = p; q < points.size(); ++q) {
      if (!covered[q] && dist(points[p], points[q]) <= eps) covered[q] = true;
    }
  }

  CoverEstimate est;
  est.scale_k = k;
  est.eps = eps;
  est.size = static_cast<int>(centers.size());
  est.metric = metric;
  est.sampled_points = sample_budget;
  est.verified = true;
  for (std::size_t q = 0; q < points.size() && est.verified; ++q) {
    bool ok = false;
    for (int c : centers) {
      if (dist(points[c], points[q]) <= eps + 1e-12) {
        ok = true;
        break;
      }
    }
    est.verified = ok;
  }
  return est;
}

}  // namespace cvlearn
