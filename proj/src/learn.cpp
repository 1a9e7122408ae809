#include "cvlearn/learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cvlearn/random_instances.hpp"

namespace cvlearn {

namespace {

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

// softplus(kVacuumShift) == 1, so all-zero parameters decode to the vacuum.
const double kVacuumShift = std::log(std::numbers::e - 1.0);

int tri_size(int dim) { return dim * (dim + 1) / 2; }

MatrixXd lower_from(const VectorXd& theta, int offset, int dim) {
  MatrixXd l = MatrixXd::Zero(dim, dim);
  int idx = offset;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) l(i, j) = theta(idx++);
  }
  return l;
}

GGChannel identity_gg_channel(int n) { return gg_from_channel(identity_channel(n)); }

double state_probe_probability(const GaussianState& st, const TrainingSample& probe) {
  if (probe.gg_effect) {
    return gg_outcome_probability(gg_from_gaussian(st), gg_from_channel(probe.channel),
                                  *probe.gg_effect);
  }
  if (probe.is_photo) return gp_outcome_probability(st, probe.channel, probe.photo_k);
  return gaussian_effect_probability(st, probe.channel, probe.effect);
}

double gg_probe_probability(const GGState& state, const TrainingSample& probe) {
  const GGChannel ch = gg_from_channel(probe.channel);
  if (probe.gg_effect) {
    return gg_outcome_probability(state, ch, *probe.gg_effect);
  }
  if (probe.is_photo) {
    throw InvalidObjectError("photon-counting probes are not defined for GG targets here");
  }
  return gg_outcome_probability(state, ch, gg_from_effect(probe.effect));
}

}  // namespace

SampleKind sample_kind_from_name(const std::string& name) {
  if (name == "heterodyne") return SampleKind::heterodyne;
  if (name == "general-dyne") return SampleKind::general_dyne;
  if (name == "photocount") return SampleKind::photocount;
  if (name == "gg-fixed") return SampleKind::gg_fixed_coeff;
  throw ConfigError("unknown sample distribution: " + name);
}

std::string sample_kind_name(SampleKind kind) {
  switch (kind) {
    case SampleKind::heterodyne: return "heterodyne";
    case SampleKind::general_dyne: return "general-dyne";
    case SampleKind::photocount: return "photocount";
    case SampleKind::gg_fixed_coeff: return "gg-fixed";
  }
  return "?";
}

HypothesisClass hypothesis_class_from_name(const std::string& name) {
  if (name == "gaussian-state") return HypothesisClass::gaussian_state;
  if (name == "gaussian-channel") return HypothesisClass::gaussian_channel;
  if (name == "gaussian-channel-iso") return HypothesisClass::gaussian_channel_iso;
  if (name == "gaussian-effect") return HypothesisClass::gaussian_effect;
  if (name == "gg-fixed-coeff") return HypothesisClass::gg_fixed_coeff;
  throw ConfigError("unknown hypothesis class: " + name);
}

double target_probability(const Target& target, const TrainingSample& probe) {
  if (target.is_gg) {
    return gg_probe_probability(target.gg, probe);
  }
  if (probe.gg_effect) {
    return gg_outcome_probability(gg_from_gaussian(target.gaussian),
                                  gg_from_channel(probe.channel), *probe.gg_effect);
  }
  if (probe.is_photo) {
    return gp_outcome_probability(target.gaussian, probe.channel, probe.photo_k);
  }
  return gaussian_effect_probability(target.gaussian, probe.channel, probe.effect);
}

namespace {

TrainingSample draw_probe(const SampleDistribution& dist, std::mt19937_64& rng) {
  TrainingSample s;
  const int n = dist.n;
  std::normal_distribution<double> g(0.0, dist.outcome_sigma);
  switch (dist.kind) {
    case SampleKind::heterodyne: {
      s.channel = identity_channel(n);
      VectorXd outcome(2 * n);
      for (int i = 0; i < 2 * n; ++i) outcome(i) = g(rng);
      s.effect = heterodyne_effect(outcome);
      break;
    }
    case SampleKind::general_dyne: {
      s.channel = random_channel(n, dist.energy_bound, rng);
      s.effect = random_effect(n, dist.energy_bound, rng);
      break;
    }
    case SampleKind::photocount: {
      s.channel = identity_channel(n);
      s.is_photo = true;
      std::uniform_int_distribution<int> photons(0, dist.photo_cutoff);
      s.photo_k.k.resize(n);
      for (int i = 0; i < n; ++i) s.photo_k.k[i] = photons(rng);
      break;
    }
    case SampleKind::gg_fixed_coeff: {
      if (!dist.gg_template) {
        throw ConfigError("gg-fixed sample distribution requires an effect template");
      }
      s.channel = identity_channel(n);
      GGEffect eff = *dist.gg_template;
      VectorXd shift(2 * n);
      for (int i = 0; i < 2 * n; ++i) shift(i) = g(rng);
      for (auto& c : eff.components) c.mean += shift.cast<Complex>();
      s.gg_effect = std::move(eff);
      break;
    }
  }
  return s;
}

}  // namespace

std::vector<TrainingSample> draw_probes(const SampleDistribution& dist, int count,
                                        std::uint64_t seed_offset) {
  std::mt19937_64 rng(dist.seed + 0x9e3779b97f4a7c15ULL * (1 + seed_offset));
  std::vector<TrainingSample> probes;
  probes.reserve(count);
  for (int t = 0; t < count; ++t) probes.push_back(draw_probe(dist, rng));
  return probes;
}

std::vector<TrainingSample> draw_training_set(const Target& target,
                                              const SampleDistribution& dist, int count) {
  if (count < 1) throw ConfigError("training set size must be >= 1");
  std::mt19937_64 probe_rng(dist.seed);
  std::mt19937_64 bit_rng(dist.seed ^ 0xd1b54a32d192ed03ULL);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<TrainingSample> samples;
  samples.reserve(count);
  for (int t = 0; t < count; ++t) {
    TrainingSample s = draw_probe(dist, probe_rng);
    double p = target_probability(target, s);
    if (p < -1e-9 || p > 1.0 + 1e-9) {
      throw InvalidObjectError("engine produced a probability outside [0,1]");
    }
    p = std::clamp(p, 0.0, 1.0);
    s.outcome_bit = (u01(bit_rng) < p) ? 1 : 0;
    samples.push_back(std::move(s));
  }
  return samples;
}

int HypothesisParam::param_dim(HypothesisClass cls, int n) {
  const int dim = 2 * n;
  switch (cls) {
    case HypothesisClass::gaussian_state:
    case HypothesisClass::gaussian_effect:
      return dim + tri_size(dim) + 1;
    case HypothesisClass::gaussian_channel:
      return dim + dim * dim + tri_size(dim) + 1;
    case HypothesisClass::gaussian_channel_iso:
      return 3;
    case HypothesisClass::gg_fixed_coeff:
      return dim + 1;
  }
  return 0;
}

int HypothesisParam::param_dim() const { return param_dim(cls, n); }

GaussianState decode_state(const HypothesisParam& hyp) {
  const int dim = 2 * hyp.n;
  GaussianState st;
  st.mean = hyp.theta.segment(0, dim);
  const MatrixXd l = lower_from(hyp.theta, dim, dim);
  const double s = softplus(hyp.theta(dim + tri_size(dim)) + kVacuumShift);
  st.cov = l * l.transpose() + 0.5 * s * MatrixXd::Identity(dim, dim);
  return st;
}

GeneralDyneEffect decode_effect(const HypothesisParam& hyp) {
  const GaussianState st = decode_state(hyp);
  return GeneralDyneEffect{st.mean, st.cov};
}

GaussianChannel decode_channel(const HypothesisParam& hyp) {
  const int dim = 2 * hyp.n;
  GaussianChannel ch;
  if (hyp.cls == HypothesisClass::gaussian_channel_iso) {
    ch.disp = VectorXd::Zero(dim);
    ch.disp(0) = hyp.theta(0);
    ch.disp(1) = hyp.theta(1);
    const double kappa = softplus(hyp.theta(2) + kVacuumShift);
    ch.x_mat = kappa * MatrixXd::Identity(dim, dim);
    ch.y_mat = (std::abs(1.0 - kappa * kappa) / 2.0 + 1e-9) * MatrixXd::Identity(dim, dim);
    return ch;
  }
  ch.disp = hyp.theta.segment(0, dim);
  ch.x_mat = Eigen::Map<const MatrixXd>(hyp.theta.data() + dim, dim, dim);
  const MatrixXd l = lower_from(hyp.theta, dim + dim * dim, dim);
  const double extra = softplus(hyp.theta(dim + dim * dim + tri_size(dim)));
  // Smallest isotropic noise making the map completely positive.
  const MatrixXd omega = symplectic_form(hyp.n);
  MatrixXcd defect = std::complex<double>(0.0, 0.5) *
                     (omega - ch.x_mat * omega * ch.x_mat.transpose()).cast<Complex>();
  defect = 0.5 * (defect + defect.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(defect, Eigen::EigenvaluesOnly);
  const double mu = std::max(0.0, -es.eigenvalues().minCoeff());
  ch.y_mat = l * l.transpose() + (mu + extra + 1e-12) * MatrixXd::Identity(dim, dim);
  return ch;
}

GGState decode_gg(const HypothesisParam& hyp) {
  if (!hyp.gg_template) throw ConfigError("gg hypothesis requires a template");
  GGState st = *hyp.gg_template;
  const int dim = 2 * hyp.n;
  const VectorXd shift = hyp.theta.segment(0, dim);
  const double angle = hyp.theta(dim);
  MatrixXd rot = MatrixXd::Identity(dim, dim);
  for (int m = 0; m < hyp.n; ++m) {
    rot(2 * m, 2 * m) = std::cos(angle);
    rot(2 * m, 2 * m + 1) = -std::sin(angle);
    rot(2 * m + 1, 2 * m) = std::sin(angle);
    rot(2 * m + 1, 2 * m + 1) = std::cos(angle);
  }
  const MatrixXcd rot_c = rot.cast<Complex>();
  for (auto& c : st.components) {
    c.mean = rot_c * c.mean + shift.cast<Complex>();
    c.cov = rot_c * c.cov * rot_c.transpose();
  }
  return st;
}

std::optional<VectorXd> encode_state(const GaussianState& st) {
  const int dim = static_cast<int>(st.mean.size());
  // Solve V - s I/2 = L L^T with the baseline s = 1; fall back to smaller s
  // when the vacuum-reduced part is not positive semidefinite.
  for (double s : {1.0, 0.7, 0.5, 0.35}) {
    const MatrixXd reduced = st.cov - 0.5 * s * MatrixXd::Identity(dim, dim);
    Eigen::LLT<MatrixXd> llt(reduced + 1e-12 * MatrixXd::Identity(dim, dim));
    if (llt.info() != Eigen::Success) continue;
    VectorXd theta(dim + tri_size(dim) + 1);
    theta.segment(0, dim) = st.mean;
    const MatrixXd l = llt.matrixL();
    int idx = dim;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j <= i; ++j) theta(idx++) = l(i, j);
    }
    // Invert s = softplus(t + c0): t = log(e^s - 1) - c0.
    theta(idx) = std::log(std::expm1(s)) - kVacuumShift;
    return theta;
  }
  return std::nullopt;
}

std::optional<double> hypothesis_probability(const HypothesisParam& hyp,
                                             const TrainingSample& probe) {
  try {
    switch (hyp.cls) {
      case HypothesisClass::gaussian_state: {
        const GaussianState st = decode_state(hyp);
        if (!validate_state(st).ok) return std::nullopt;
        if (probe.gg_effect) {
          return gg_outcome_probability(gg_from_gaussian(st), gg_from_channel(probe.channel),
                                        *probe.gg_effect);
        }
        if (probe.is_photo) return gp_outcome_probability(st, probe.channel, probe.photo_k);
        return gaussian_effect_probability(st, probe.channel, probe.effect);
      }
      case HypothesisClass::gaussian_effect: {
        const GeneralDyneEffect eff = decode_effect(hyp);
        if (!validate_effect(eff).ok) return std::nullopt;
        if (probe.is_photo || probe.gg_effect) return std::nullopt;
        // Probe carries the state role in measurement learning.
        const GaussianState st{probe.effect.outcome, probe.effect.cov};
        return gaussian_effect_probability(st, probe.channel, eff);
      }
      case HypothesisClass::gaussian_channel:
      case HypothesisClass::gaussian_channel_iso:
        // Channel hypotheses are trained on task instances; the bit-sample
        // path has no state slot for them.
        return std::nullopt;
      case HypothesisClass::gg_fixed_coeff: {
        const GGState st = decode_gg(hyp);
        if (probe.is_photo) return std::nullopt;
        return gg_probe_probability(st, probe);
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

LossReport empirical_loss(const HypothesisParam& hyp, const std::vector<TrainingSample>& samples,
                          LossKind kind) {
  LossReport rep;
  rep.per_sample.reserve(samples.size());
  for (const auto& s : samples) {
    const auto p = hypothesis_probability(hyp, s);
    const double prob = p ? std::clamp(*p, 0.0, 1.0) : 1.0;
    const double diff = std::abs(prob - static_cast<double>(s.outcome_bit));
    const double loss = (kind == LossKind::quadratic) ? diff * diff : diff;
    rep.per_sample.push_back(loss);
    rep.max = std::max(rep.max, loss);
    rep.total += loss;
  }
  if (!rep.per_sample.empty()) rep.mean = rep.total / rep.per_sample.size();
  return rep;
}

ErmOutcome erm_search(HypothesisClass cls, int n, const std::vector<TrainingSample>& samples,
                      const ErmConfig& cfg, std::optional<GGState> gg_template) {
  if (samples.empty()) throw ConfigError("erm_search requires at least one sample");
  const auto t0 = std::chrono::steady_clock::now();

  HypothesisParam proto;
  proto.cls = cls;
  proto.n = n;
  proto.gg_template = std::move(gg_template);
  const int dim = proto.param_dim();

  auto objective = [&](const VectorXd& theta) {
    HypothesisParam hyp = proto;
    hyp.theta = theta;
    // Decode and validate once; per-probe work is then pure evaluation.
    GaussianState decoded_state;
    GeneralDyneEffect decoded_effect;
    GGState decoded_gg;
    try {
      switch (cls) {
        case HypothesisClass::gaussian_state:
          decoded_state = decode_state(hyp);
          if (!validate_state(decoded_state).ok) {
            return cfg.infeasible_penalty + theta.squaredNorm();
          }
          break;
        case HypothesisClass::gaussian_effect:
          decoded_effect = decode_effect(hyp);
          if (!validate_effect(decoded_effect).ok) {
            return cfg.infeasible_penalty + theta.squaredNorm();
          }
          break;
        case HypothesisClass::gg_fixed_coeff:
          decoded_gg = decode_gg(hyp);
          break;
        default:
          return cfg.infeasible_penalty + theta.squaredNorm();
      }
    } catch (const std::exception&) {
      return cfg.infeasible_penalty + theta.squaredNorm();
    }
    double worst = 0.0;
    double acc = 0.0;
    for (const auto& s : samples) {
      double prob;
      try {
        switch (cls) {
          case HypothesisClass::gaussian_state:
            prob = state_probe_probability(decoded_state, s);
            break;
          case HypothesisClass::gaussian_effect: {
            if (s.is_photo || s.gg_effect) return cfg.infeasible_penalty;
            const GaussianState probe_state{s.effect.outcome, s.effect.cov};
            prob = gaussian_effect_probability(probe_state, s.channel, decoded_effect);
            break;
          }
          case HypothesisClass::gg_fixed_coeff:
            prob = gg_probe_probability(decoded_gg, s);
            break;
          default:
            return cfg.infeasible_penalty;
        }
      } catch (const std::exception&) {
        return cfg.infeasible_penalty + theta.squaredNorm();
      }
      prob = std::clamp(prob, 0.0, 1.0);
      const double diff = prob - static_cast<double>(s.outcome_bit);
      switch (cfg.mode) {
        case ErmMode::per_instance_max:
          worst = std::max(worst, std::abs(diff));
          break;
        case ErmMode::mean_quadratic:
          acc += diff * diff;
          break;
        case ErmMode::cumulative:
          acc += std::abs(diff);
          break;
      }
    }
    if (cfg.mode == ErmMode::per_instance_max) return worst;
    if (cfg.mode == ErmMode::mean_quadratic) return acc / static_cast<double>(samples.size());
    return acc;
  };

  const OptimizerResult opt = minimize(objective, VectorXd::Zero(dim), cfg.optimizer);

  ErmOutcome out;
  out.hypothesis = proto;
  out.hypothesis.theta = opt.best;
  const LossReport rep = empirical_loss(out.hypothesis, samples, cfg.report_loss);
  out.report.eta_max = rep.max;
  out.report.eta_mean = rep.mean;
  out.report.objective = opt.best_value;
  out.report.evals = opt.evals;
  out.report.converged = opt.converged || opt.best_value < cfg.infeasible_penalty;
  out.report.seed = cfg.optimizer.seed;
  out.report.trace = opt.trace;
  out.report.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return out;
}

GapStatistics evaluate_generalization(const HypothesisParam& hyp, const Target& target,
                                      const SampleDistribution& dist, int n_test,
                                      const std::vector<double>& gamma_grid, double eta_ref) {
  if (n_test < 100) throw ConfigError("generalization evaluation needs >= 100 probes");
  const auto probes = draw_probes(dist, n_test, 7777);
  std::vector<double> losses;
  losses.reserve(probes.size());
  double mean = 0.0;
  for (const auto& probe : probes) {
    const double pt = std::clamp(target_probability(target, probe), 0.0, 1.0);
    const auto ph = hypothesis_probability(hyp, probe);
    const double loss = std::abs((ph ? std::clamp(*ph, 0.0, 1.0) : 1.0) - pt);
    losses.push_back(loss);
    mean += loss;
  }
  std::sort(losses.begin(), losses.end());
  GapStatistics gs;
  gs.n_test = n_test;
  gs.mean = mean / losses.size();
  auto quant = [&](double q) {
    const std::size_t idx = std::min(losses.size() - 1,
                                     static_cast<std::size_t>(q * losses.size()));
    return losses[idx];
  };
  gs.q50 = quant(0.50);
  gs.q90 = quant(0.90);
  gs.q95 = quant(0.95);
  for (double gamma : gamma_grid) {
    const double threshold = eta_ref + gamma;
    const auto above = std::count_if(losses.begin(), losses.end(),
                                     [&](double l) { return l > threshold; });
    gs.exceedance.emplace_back(gamma, static_cast<double>(above) / losses.size());
  }
  return gs;
}

VectorXd EncodingPoly::eval(double x) const {
  VectorXd out(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    double acc = 0.0;
    double pw = 1.0;
    for (int d = 0; d <= order && d < static_cast<int>(coeffs[j].size()); ++d) {
      acc += coeffs[j][d] * pw;
      pw *= x;
    }
    out(static_cast<Eigen::Index>(j)) = acc;
  }
  return out;
}

bool EncodingPoly::valid() const {
  if (order < 0) return false;
  for (const auto& c : coeffs) {
    if (static_cast<int>(c.size()) != order + 1) return false;
  }
  return true;
}

namespace {

struct TaskInstance {
  GaussianState state;
  GeneralDyneEffect effect;
};

TaskInstance task_instance(const TaskSpec& task, double x) {
  TaskInstance inst;
  inst.state.mean = task.state_mean.eval(x);
  inst.state.cov = 0.5 * MatrixXd::Identity(2 * task.n, 2 * task.n);
  inst.effect = heterodyne_effect(task.effect_outcome.eval(x));
  return inst;
}

double channel_task_loss(const GaussianChannel& ch, const TaskInstance& inst) {
  return 1.0 - gaussian_effect_probability(inst.state, ch, inst.effect);
}

}  // namespace

double task_mean_loss(const TaskSpec& task, const HypothesisParam& hyp) {
  const GaussianChannel ch = decode_channel(hyp);
  double acc = 0.0;
  for (double x : task.labels) acc += channel_task_loss(ch, task_instance(task, x));
  return acc / task.labels.size();
}

TaskRunResult task_learning_run(const TaskSpec& task, HypothesisClass cls, int train_count,
                                std::uint64_t seed, const ErmConfig& cfg) {
  if (!task.state_mean.valid() || !task.effect_outcome.valid() || task.labels.empty()) {
    throw ConfigError("task specification is incomplete");
  }
  if (cls != HypothesisClass::gaussian_channel && cls != HypothesisClass::gaussian_channel_iso) {
    throw ConfigError("task learning optimizes a channel class");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, task.labels.size() - 1);
  std::vector<TaskInstance> train;
  train.reserve(train_count);
  for (int t = 0; t < train_count; ++t) {
    train.push_back(task_instance(task, task.labels[pick(rng)]));
  }

  HypothesisParam proto;
  proto.cls = cls;
  proto.n = task.n;
  const int dim = proto.param_dim();

  auto objective = [&](const VectorXd& theta) {
    HypothesisParam hyp = proto;
    hyp.theta = theta;
    GaussianChannel ch;
    try {
      ch = decode_channel(hyp);
    } catch (const std::exception&) {
      return cfg.infeasible_penalty + theta.squaredNorm();
    }
    if (!validate_channel(ch).ok) return cfg.infeasible_penalty + theta.squaredNorm();
    double acc = 0.0;
    for (const auto& inst : train) acc += channel_task_loss(ch, inst);
    return acc;
  };

  const OptimizerResult opt = minimize(objective, VectorXd::Zero(dim), cfg.optimizer);

  TaskRunResult out;
  out.hypothesis = proto;
  out.hypothesis.theta = opt.best;
  out.train_mean_loss = opt.best_value / train_count;
  out.heldout_mean_loss = task_mean_loss(task, out.hypothesis);
  out.heldout_success = 1.0 - out.heldout_mean_loss;
  out.report.objective = opt.best_value;
  out.report.evals = opt.evals;
  out.report.converged = opt.best_value < cfg.infeasible_penalty;
  out.report.seed = seed;
  out.report.trace = opt.trace;
  out.report.eta_mean = out.train_mean_loss;
  out.report.eta_max = out.train_mean_loss;
  out.report.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return out;
}

double task_grid_search_optimum(const TaskSpec& task, double disp_range, double kappa_max,
                                int grid_points) {
  if (grid_points < 2) throw ConfigError("grid search needs at least two points per axis");
  double best = 0.0;
  const int dim = 2 * task.n;
  for (int i = 0; i < grid_points; ++i) {
    const double d1 = -disp_range + 2.0 * disp_range * i / (grid_points - 1);
    for (int j = 0; j < grid_points; ++j) {
      const double d2 = -disp_range + 2.0 * disp_range * j / (grid_points - 1);
      for (int g = 0; g < grid_points; ++g) {
        const double kappa = 0.05 + (kappa_max - 0.05) * g / (grid_points - 1);
        GaussianChannel ch;
        ch.disp = VectorXd::Zero(dim);
        ch.disp(0) = d1;
        ch.disp(1) = d2;
        ch.x_mat = kappa * MatrixXd::Identity(dim, dim);
        ch.y_mat = (std::abs(1.0 - kappa * kappa) / 2.0 + 1e-9) * MatrixXd::Identity(dim, dim);
        double acc = 0.0;
        for (double x : task.labels) {
          acc += 1.0 - channel_task_loss(ch, task_instance(task, x));
        }
        best = std::max(best, acc / task.labels.size());
      }
    }
  }
  return best;
}

}  // namespace cvlearn
