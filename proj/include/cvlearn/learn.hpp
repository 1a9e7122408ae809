#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvlearn/gaussian.hpp"
#include "cvlearn/ggstate.hpp"
#include "cvlearn/optimize.hpp"
#include "cvlearn/photocount.hpp"

namespace cvlearn {

// ---------------------------------------------------------------------------
// Targets and probes

/// Learning target: either a plain Gaussian state or a GG state.
struct Target {
  bool is_gg = false;
  GaussianState gaussian;
  GGState gg;

  static Target from_gaussian(GaussianState st) {
    Target t;
    t.gaussian = std::move(st);
    return t;
  }
  static Target from_gg(GGState st) {
    Target t;
    t.is_gg = true;
    t.gg = std::move(st);
    return t;
  }
  int modes() const { return is_gg ? gg.n : gaussian.modes(); }
};

enum class SampleKind {
  heterodyne,          // identity channel, heterodyne effect at a random outcome
  general_dyne,        // random valid channels and general-dyne effects
  photocount,          // identity channel, photon-number projector
  gg_fixed_coeff,      // displaced copies of a fixed GG effect (fixed coefficients)
};

SampleKind sample_kind_from_name(const std::string& name);
std::string sample_kind_name(SampleKind kind);

struct SampleDistribution {
  SampleKind kind = SampleKind::heterodyne;
  int n = 1;
  double outcome_sigma = 1.5;  // spread of heterodyne outcomes / displacements
  double energy_bound = 6.0;   // energy budget for random channels/effects
  int photo_cutoff = 6;        // max photon number for photocount probes
  std::uint64_t seed = 1;
  // Fixed effect template for the gg_fixed_coeff kind (coefficients frozen).
  std::optional<GGEffect> gg_template;
};

/// One measurement record: the probe and the observed bit.
struct TrainingSample {
  GaussianChannel channel;
  bool is_photo = false;
  GeneralDyneEffect effect;       // when !is_photo
  HermiteIndex photo_k;           // when is_photo
  std::optional<GGEffect> gg_effect;  // set for gg probes
  int outcome_bit = 0;
};

/// Probability the target assigns to a probe; the ground-truth p-concept.
double target_probability(const Target& target, const TrainingSample& probe);

std::vector<TrainingSample> draw_training_set(const Target& target,
                                              const SampleDistribution& dist, int count);

/// Fresh probes without outcome bits (for held-out evaluation).
std::vector<TrainingSample> draw_probes(const SampleDistribution& dist, int count,
                                        std::uint64_t seed_offset);

// ---------------------------------------------------------------------------
// Hypotheses

enum class HypothesisClass {
  gaussian_state,
  gaussian_channel,
  gaussian_channel_iso,  // displacement + isotropic gain with minimal noise
  gaussian_effect,
  gg_fixed_coeff,        // displaced/rotated copy of a template with fixed coefficients
};

HypothesisClass hypothesis_class_from_name(const std::string& name);

/// Unconstrained parameter vector plus the decode map to physical objects.
///
/// gaussian_state / gaussian_effect decode as mean = theta[0:2n) and
/// V = L L^T + s I/2 with L lower-triangular from the next n(2n+1) entries
/// and s = softplus(theta_last + c0), c0 chosen so theta = 0 is the vacuum.
/// Validity holds whenever s >= 1; smaller s is accepted only if the decoded
/// object passes the validator (checked post-decode).
///
/// gaussian_channel decodes X freely and Y = L L^T + (mu(X) + softplus) I
/// where mu(X) is the smallest isotropic noise making the channel CPTP, so
/// decoded channels are always valid.
struct HypothesisParam {
  HypothesisClass cls = HypothesisClass::gaussian_state;
  int n = 1;
  VectorXd theta;
  std::optional<GGState> gg_template;  // for gg_fixed_coeff

  int param_dim() const;
  static int param_dim(HypothesisClass cls, int n);
};

GaussianState decode_state(const HypothesisParam& hyp);
GaussianChannel decode_channel(const HypothesisParam& hyp);
GeneralDyneEffect decode_effect(const HypothesisParam& hyp);
GGState decode_gg(const HypothesisParam& hyp);

/// Encode a Gaussian state into hypothesis coordinates (inverse of
/// decode_state when the covariance is representable). Used to build
/// realizable targets.
std::optional<VectorXd> encode_state(const GaussianState& st);

/// Probability the decoded hypothesis assigns to a probe. Invalid decodes
/// return nullopt (the search treats them as infeasible).
std::optional<double> hypothesis_probability(const HypothesisParam& hyp,
                                             const TrainingSample& probe);

// ---------------------------------------------------------------------------
// Losses and search

enum class LossKind { quadratic, linear, total_variation };

struct LossReport {
  std::vector<double> per_sample;
  double max = 0.0;
  double mean = 0.0;
  double total = 0.0;
};

LossReport empirical_loss(const HypothesisParam& hyp, const std::vector<TrainingSample>& samples,
                          LossKind kind);

enum class ErmMode {
  per_instance_max,  // minimize the worst per-sample loss
  mean_quadratic,    // minimize the average quadratic loss
  cumulative,        // minimize the summed loss (task mode)
};

struct ErmConfig {
  ErmMode mode = ErmMode::mean_quadratic;
  LossKind report_loss = LossKind::linear;
  OptimizerConfig optimizer;
  double infeasible_penalty = 1e6;
};

struct LearningReport {
  double eta_max = 0.0;        // worst per-sample loss of the returned hypothesis
  double eta_mean = 0.0;
  double objective = 0.0;      // value of the optimized objective
  long long evals = 0;
  bool converged = false;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> trace;
};

struct ErmOutcome {
  HypothesisParam hypothesis;
  LearningReport report;
};

ErmOutcome erm_search(HypothesisClass cls, int n, const std::vector<TrainingSample>& samples,
                      const ErmConfig& cfg, std::optional<GGState> gg_template = std::nullopt);

// ---------------------------------------------------------------------------
// Generalization

struct GapStatistics {
  int n_test = 0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q95 = 0.0;
  double mean = 0.0;
  std::vector<std::pair<double, double>> exceedance;  // (gamma, fraction > eta_ref + gamma)
};

/// Empirical distribution of |P_hyp - P_target| on fresh probes; exceedance
/// fractions are measured against eta_ref + gamma (eta_ref = 0 asks for the
/// realizable ideal).
GapStatistics evaluate_generalization(const HypothesisParam& hyp, const Target& target,
                                      const SampleDistribution& dist, int n_test,
                                      const std::vector<double>& gamma_grid, double eta_ref);

// ---------------------------------------------------------------------------
// Task learning (discrimination / synthesis style)

/// Degree-ell polynomial map from a scalar label to a parameter vector:
/// output j is sum_d coeffs[j][d] x^d.
struct EncodingPoly {
  int order = 0;
  std::vector<std::vector<double>> coeffs;

  VectorXd eval(double x) const;
  bool valid() const;
};

/// Task instances are coherent-like input states (mean = state_mean(x),
/// vacuum covariance) paired with heterodyne readouts at effect_outcome(x);
/// every pair is labelled "accept".
struct TaskSpec {
  int n = 1;
  EncodingPoly state_mean;      // 2n outputs
  EncodingPoly effect_outcome;  // 2n outputs
  std::vector<double> labels;   // discrete label set; sampled uniformly
};

struct TaskRunResult {
  HypothesisParam hypothesis;
  LearningReport report;
  double train_mean_loss = 0.0;     // mean of 1 - P over the training set
  double heldout_mean_loss = 0.0;   // mean of 1 - P over fresh labels
  double heldout_success = 0.0;     // 1 - heldout_mean_loss
};

TaskRunResult task_learning_run(const TaskSpec& task, HypothesisClass cls, int train_count,
                                std::uint64_t seed, const ErmConfig& cfg);

/// Exhaustive grid search over the isotropic channel class for the same
/// task; the independent optimum used to judge learned channels.
double task_grid_search_optimum(const TaskSpec& task, double disp_range, double kappa_max,
                                int grid_points);

/// Mean task loss of an explicit hypothesis over the label set.
double task_mean_loss(const TaskSpec& task, const HypothesisParam& hyp);

}  // namespace cvlearn
