#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvlearn {

/// A parametrized real-valued function class f(theta, x) together with the
/// box ranges the searches draw parameters and inputs from.
struct FunctionClassHandle {
  std::function<double(const Eigen::VectorXd& theta, const Eigen::VectorXd& x)> eval;
  int param_dim = 0;
  int input_dim = 0;
  std::string tag;
  double out_lo = 0.0;
  double out_hi = 1.0;
  double param_range = 2.0;  // parameters sampled uniformly in [-r, r]
  double input_range = 2.0;  // inputs sampled uniformly in [-r, r]
};

// Built-in handles.
FunctionClassHandle constant_class_handle();
FunctionClassHandle displacement_only_handle();
FunctionClassHandle gaussian_state_class_handle(int n);
FunctionClassHandle cat_family_handle();
/// Gaussian-state hypotheses probed by loss channels followed by
/// photon-number readouts up to `max_photons`.
FunctionClassHandle photocount_class_handle(int max_photons);

/// Witnessed shattering of k inputs with margin gamma: for every one of the
/// 2^k sign patterns a parameter vector clears the thresholds by gamma.
struct ShatterCertificate {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<double> thresholds;
  std::vector<Eigen::VectorXd> witnesses;  // indexed by pattern bits
  double gamma = 0.0;
  double worst_margin = 0.0;
};

/// Re-evaluates every witness against every input; true when all margins
/// clear gamma.
bool verify_certificate(const FunctionClassHandle& handle, const ShatterCertificate& cert);

struct FatShatteringResult {
  int k_certified = 0;
  std::optional<ShatterCertificate> certificate;  // for k_certified
  bool budget_exhausted = false;
  long long evals_used = 0;
};

/// Budgeted search for the largest input set shattered with margin gamma;
/// every reported k is re-verified by direct evaluation, so results are
/// lower bounds.
FatShatteringResult fat_shattering_lower_bound(const FunctionClassHandle& handle, double gamma,
                                               int k_max, long long budget, std::uint64_t seed);

enum class CoverMetric { euclidean, scaled_one_norm };

struct CoverEstimate {
  int scale_k = 0;
  double eps = 0.0;
  int size = 0;
  CoverMetric metric = CoverMetric::euclidean;
  bool verified = false;
  int sampled_points = 0;
};

/// Greedy internal cover of the class restricted to k sampled inputs, over
/// `sample_budget` sampled parameter vectors; a lower estimate of the true
/// covering requirement. Metrics are the k-normalized 2- and 1-norms.
CoverEstimate covering_number_estimate(const FunctionClassHandle& handle, double eps, int k,
                                       int sample_budget, std::uint64_t seed,
                                       CoverMetric metric = CoverMetric::euclidean);

}  // namespace cvlearn
