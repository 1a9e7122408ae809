#include "cvlearn/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "cvlearn/bounds.hpp"
#include "cvlearn/dims.hpp"
#include "cvlearn/io.hpp"
#include "cvlearn/learn.hpp"

namespace cvlearn {

namespace {

constexpr const char* kArtifactVersion = "cvlearn 1.0";

int thread_budget(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("CVLEARN_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const double from_cfg = cfg.number_or("", "threads", 0.0);
  if (from_cfg > 0.0) return static_cast<int>(from_cfg);
  const unsigned hw = std::thread::hardware_concurrency();
  return std::max(1, std::min<int>(8, static_cast<int>(hw ? hw : 1)));
}

/// Deterministic realizable target: decoder coordinates drawn per (n, seed),
/// redrawn until they decode to a valid state.
Target sweep_target(const std::string& kind, int n, std::uint64_t seed) {
  if (kind == "vacuum") return Target::from_gaussian(vacuum_state(n));
  HypothesisParam hyp;
  hyp.cls = HypothesisClass::gaussian_state;
  hyp.n = n;
  std::mt19937_64 rng(seed * 2654435761ULL + n);
  std::normal_distribution<double> g(0.0, 0.25);
  hyp.theta.resize(hyp.param_dim());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (int i = 0; i < hyp.theta.size(); ++i) hyp.theta(i) = g(rng);
    // Means slightly wider than covariance perturbations; the width knob is
    // kept nonnegative so the sufficient validity condition holds.
    for (int i = 0; i < 2 * n; ++i) hyp.theta(i) *= 3.0;
    hyp.theta(hyp.theta.size() - 1) = std::abs(hyp.theta(hyp.theta.size() - 1));
    const GaussianState st = decode_state(hyp);
    if (validate_state(st).ok) return Target::from_gaussian(st);
  }
  return Target::from_gaussian(vacuum_state(n));
}

SweepRow learn_state_once(int n, int train_count, std::uint64_t seed,
                          const std::string& dist_name, const std::string& target_kind,
                          double outcome_sigma, long long evals, double gamma, int n_test,
                          double eta_ref, double wall_budget_ms = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  const Target target = sweep_target(target_kind, n, seed);

  SampleDistribution dist;
  dist.kind = sample_kind_from_name(dist_name);
  dist.n = n;
  // Per-coordinate spread shrinks with the mode count so the probe overlap
  // with the target carries comparable signal at every n; without this the
  // absolute-loss scale decays exponentially in n and sweeps across n are
  // not comparable.
  dist.outcome_sigma = outcome_sigma / std::sqrt(static_cast<double>(n));
  dist.seed = seed;

  const auto samples = draw_training_set(target, dist, train_count);

  ErmConfig cfg;
  cfg.mode = ErmMode::mean_quadratic;
  cfg.optimizer.max_evals = evals;
  cfg.optimizer.seed = seed;
  cfg.optimizer.population = 20;
  cfg.optimizer.restarts = 2;
  cfg.optimizer.init_step = 0.4;
  cfg.optimizer.max_wall_ms = wall_budget_ms;
  const auto outcome = erm_search(HypothesisClass::gaussian_state, n, samples, cfg);

  const auto gaps = evaluate_generalization(outcome.hypothesis, target, dist, n_test, {gamma},
                                            eta_ref);
  SweepRow row;
  row.setting = dist_name;
  row.n = n;
  row.train_count = train_count;
  row.seed = seed;
  row.eta = gaps.mean;
  row.gap_q50 = gaps.q50;
  row.gap_q95 = gaps.q95;
  row.exceed_frac = gaps.exceedance.empty() ? 0.0 : gaps.exceedance.front().second;
  row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

std::string sweep_csv_header() {
  return "setting,n,T,seed,eta,gap_q50,gap_q95,exceed_frac,wall_ms";
}

std::string sweep_csv_row(const SweepRow& row) {
  std::ostringstream os;
  os << row.setting << "," << row.n << "," << row.train_count << "," << row.seed << ","
     << csv_number(row.eta) << "," << csv_number(row.gap_q50) << "," << csv_number(row.gap_q95)
     << "," << csv_number(row.exceed_frac) << "," << csv_number(row.wall_ms);
  return os.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  const auto ns = cfg.numbers("sweep", "n");
  const auto ts = cfg.numbers("sweep", "T");
  const auto seeds = cfg.numbers("sweep", "seeds");
  const std::string dist_name = cfg.text_or("sweep", "dist", "heterodyne");
  const std::string target_kind = cfg.text_or("sweep", "target_kind", "random");
  const double sigma = cfg.number_or("sweep", "outcome_sigma", 1.5);
  const long long evals = static_cast<long long>(cfg.number_or("sweep", "evals", 4000));
  const double gamma = cfg.number_or("sweep", "gamma", 0.1);
  const int n_test = static_cast<int>(cfg.number_or("sweep", "n_test", 400));
  const double wall_budget = cfg.number_or("sweep", "wall_budget_ms", 0.0);

  struct Job {
    int n;
    int t;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double n : ns) {
    for (double t : ts) {
      for (double s : seeds) {
        jobs.push_back({static_cast<int>(n), static_cast<int>(t),
                        static_cast<std::uint64_t>(s)});
      }
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int workers = std::min<int>(thread_budget(cfg), static_cast<int>(jobs.size()));
  auto work = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) break;
      const Job& job = jobs[idx];
      try {
        rows[idx] = learn_state_once(job.n, job.t, job.seed, dist_name, target_kind, sigma,
                                     evals, gamma, n_test, 0.0, wall_budget);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

ScalingFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<std::vector<double>>& per_seed_ys, int bootstrap,
                            std::uint64_t seed) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ConfigError("scaling fit needs at least two grid points");
  }
  auto slope_of = [](const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(x.size());
    for (int i = 0; i < m; ++i) {
      const double lx = std::log(x[i]);
      const double ly = std::log(std::max(y[i], 1e-12));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };

  ScalingFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.slope = slope_of(xs, ys);

  if (!per_seed_ys.empty() && bootstrap > 0) {
    std::mt19937_64 rng(seed);
    std::vector<double> slopes;
    slopes.reserve(bootstrap);
    const std::size_t n_seeds = per_seed_ys.front().size();
    std::uniform_int_distribution<std::size_t> pick(0, n_seeds - 1);
    for (int b = 0; b < bootstrap; ++b) {
      std::vector<double> resampled(xs.size(), 0.0);
      std::vector<std::size_t> chosen(n_seeds);
      for (auto& c : chosen) c = pick(rng);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double acc = 0.0;
        for (std::size_t c : chosen) acc += per_seed_ys[i][c];
        resampled[i] = acc / n_seeds;
      }
      slopes.push_back(slope_of(xs, resampled));
    }
    std::sort(slopes.begin(), slopes.end());
    fit.ci_lo = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
    fit.ci_hi = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
  } else {
    fit.ci_lo = fit.ci_hi = fit.slope;
  }
  return fit;
}

ScalingSummary sweep_scaling(const std::vector<SweepRow>& rows, double target_gap, int bootstrap,
                             std::uint64_t seed) {
  if (rows.empty()) throw ConfigError("sweep produced no rows");
  std::vector<int> ns, ts;
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rows) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    if (std::find(ts.begin(), ts.end(), r.train_count) == ts.end()) ts.push_back(r.train_count);
    if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
  }
  std::sort(ns.begin(), ns.end());
  std::sort(ts.begin(), ts.end());
  std::sort(seeds.begin(), seeds.end());
  if (ts.size() < 3) throw ConfigError("scaling needs at least three training-size grid points");

  auto row_of = [&](int n, int t, std::uint64_t s) -> const SweepRow& {
    for (const auto& r : rows) {
      if (r.n == n && r.train_count == t && r.seed == s) return r;
    }
    throw ConfigError("sweep grid is not complete");
  };

  // T*(n, seed): first grid T whose mean gap reaches the target, with
  // log-space interpolation; extrapolation at the Monte-Carlo rate when the
  // grid never reaches it.
  auto t_star = [&](int n, std::uint64_t s) {
    double prev_t = 0.0, prev_gap = 0.0;
    for (int t : ts) {
      const double gap = row_of(n, t, s).eta;
      if (gap <= target_gap) {
        if (prev_t == 0.0 || prev_gap <= target_gap) return static_cast<double>(t);
        const double w = (std::log(prev_gap) - std::log(target_gap)) /
                         (std::log(prev_gap) - std::log(gap));
        return std::exp(std::log(prev_t) + w * (std::log(t) - std::log(prev_t)));
      }
      prev_t = t;
      prev_gap = gap;
    }
    const double last_gap = row_of(n, ts.back(), s).eta;
    return ts.back() * (last_gap / target_gap) * (last_gap / target_gap);
  };

  ScalingSummary out;
  std::vector<double> xs_n, mean_tstar;
  std::vector<std::vector<double>> per_seed_tstar;
  for (int n : ns) {
    std::vector<double> per_seed;
    double acc = 0.0;
    for (auto s : seeds) {
      const double v = t_star(n, s);
      per_seed.push_back(v);
      acc += v;
    }
    xs_n.push_back(n);
    mean_tstar.push_back(acc / seeds.size());
    per_seed_tstar.push_back(per_seed);
    out.t_needed_by_n.push_back(acc / seeds.size());
  }
  if (ns.size() >= 2) {
    out.t_needed_vs_n = fit_loglog_slope(xs_n, mean_tstar, per_seed_tstar, bootstrap, seed);
  }

  // Gap against training size: per-n slopes averaged, bootstrap over seeds.
  std::vector<double> xs_t(ts.begin(), ts.end());
  std::vector<double> mean_gap(ts.size(), 0.0);
  std::vector<std::vector<double>> per_seed_gap(ts.size());
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    for (auto s : seeds) {
      double acc = 0.0;
      for (int n : ns) acc += row_of(n, ts[ti], s).eta;
      per_seed_gap[ti].push_back(acc / ns.size());
    }
    mean_gap[ti] = 0.0;
    for (double v : per_seed_gap[ti]) mean_gap[ti] += v;
    mean_gap[ti] /= per_seed_gap[ti].size();
  }
  out.gap_vs_t = fit_loglog_slope(xs_t, mean_gap, per_seed_gap, bootstrap, seed ^ 0xabcdULL);
  return out;
}

namespace {

Target named_target(const std::string& name, int n, Complex alpha) {
  if (name == "vacuum") return Target::from_gaussian(vacuum_state(n));
  if (name == "coherent") {
    if (n != 1) throw ConfigError("named coherent target is single-mode");
    return Target::from_gaussian(coherent_state(alpha));
  }
  if (name == "cat-plus") return Target::from_gg(make_cat_state(alpha, CatSign::plus));
  if (name == "cat-minus") return Target::from_gg(make_cat_state(alpha, CatSign::minus));
  throw ConfigError("unknown named target: " + name);
}

json result_record(const ExperimentConfig& cfg, double wall_ms) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return {{"config_hash", cfg.hash()},
          {"version", kArtifactVersion},
          {"wall_ms", wall_ms},
          {"timestamp_ms",
           std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

int run_prob(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(cfg.number_or("prob", "n", 1));
  const std::string state_name = cfg.text_or("prob", "state", "vacuum");
  const std::string channel_name = cfg.text_or("prob", "channel", "identity");
  const std::string effect_name = cfg.text_or("prob", "effect", "heterodyne");
  const Complex alpha(cfg.number_or("prob", "alpha_re", 1.0),
                      cfg.number_or("prob", "alpha_im", 0.0));

  GaussianState state;
  if (state_name == "vacuum") {
    state = vacuum_state(n);
  } else if (state_name == "coherent") {
    state = coherent_state(alpha);
  } else {
    state = gaussian_state_from_json(load_json_file(state_name));
  }
  GaussianChannel channel =
      channel_name == "identity" ? identity_channel(n)
                                 : gaussian_channel_from_json(load_json_file(channel_name));
  GeneralDyneEffect effect;
  if (effect_name == "heterodyne") {
    VectorXd outcome = VectorXd::Zero(2 * n);
    if (cfg.has("prob", "outcome")) {
      const auto vals = cfg.numbers("prob", "outcome");
      for (std::size_t i = 0; i < vals.size() && i < static_cast<std::size_t>(2 * n); ++i) {
        outcome(static_cast<Eigen::Index>(i)) = vals[i];
      }
    }
    effect = heterodyne_effect(outcome);
  } else {
    effect = general_dyne_effect_from_json(load_json_file(effect_name));
  }

  const double p = gaussian_effect_probability(state, channel, effect);
  const double density = gaussian_outcome_density(state, channel, effect);
  std::ostringstream csv;
  csv << "kind,n,probability,density\n";
  csv << "prob," << n << "," << csv_number(p) << "," << csv_number(density) << "\n";
  const std::string out_csv = cfg.text_or("prob", "out_csv", "");
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  std::cout << csv.str();
  return 0;
}

int run_learn(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(cfg.number_or("learn", "n", 1));
  const std::string dist_name = cfg.text_or("learn", "dist", "heterodyne");
  const int train_count = static_cast<int>(cfg.number_or("learn", "T", 1000));
  const auto seeds = cfg.has("learn", "seeds") ? cfg.numbers("learn", "seeds")
                                               : std::vector<double>{1.0};
  const long long evals = static_cast<long long>(cfg.number_or("learn", "evals", 4000));
  const double gamma = cfg.number_or("learn", "gamma", 0.1);
  const int n_test = static_cast<int>(cfg.number_or("learn", "n_test", 400));
  const double eta_ref = cfg.number_or("learn", "eta_ref", 0.0);

  Target target;
  const std::string target_name = cfg.text_or("learn", "target", "random");
  const Complex alpha(cfg.number_or("learn", "target_alpha", 1.0), 0.0);
  if (target_name == "random") {
    target = sweep_target(cfg.text_or("learn", "target_kind", "random"), n,
                          static_cast<std::uint64_t>(seeds.front()));
  } else if (target_name.find(".json") != std::string::npos) {
    target = target_from_json(load_json_file(target_name));
  } else {
    target = named_target(target_name, n, alpha);
  }

  std::ostringstream csv;
  csv << sweep_csv_header() << "\n";
  json reports = json::array();
  for (double seed_raw : seeds) {
    const auto seed = static_cast<std::uint64_t>(seed_raw);
    SampleDistribution dist;
    dist.kind = sample_kind_from_name(dist_name);
    dist.n = n;
    dist.outcome_sigma = cfg.number_or("learn", "outcome_sigma", 1.5);
    dist.seed = seed;
    const auto samples = draw_training_set(target, dist, train_count);
    ErmConfig ecfg;
    ecfg.mode = ErmMode::mean_quadratic;
    ecfg.optimizer.max_evals = evals;
    ecfg.optimizer.seed = seed;
    const auto outcome = erm_search(HypothesisClass::gaussian_state, n, samples, ecfg);
    const auto gaps =
        evaluate_generalization(outcome.hypothesis, target, dist, n_test, {gamma}, eta_ref);
    SweepRow row;
    row.setting = dist_name;
    row.n = n;
    row.train_count = train_count;
    row.seed = seed;
    row.eta = gaps.mean;
    row.gap_q50 = gaps.q50;
    row.gap_q95 = gaps.q95;
    row.exceed_frac = gaps.exceedance.front().second;
    row.wall_ms = outcome.report.wall_ms;
    csv << sweep_csv_row(row) << "\n";
    json rep = to_json(outcome.report);
    rep["gaps"] = to_json(gaps);
    rep["seed"] = seed;
    reports.push_back(std::move(rep));
  }
  const std::string out_csv = cfg.text_or("learn", "out_csv", "");
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  const std::string out_json = cfg.text_or("learn", "out_json", "");
  if (!out_json.empty()) {
    json doc = {{"record", result_record(cfg, 0.0)}, {"runs", reports}};
    write_json_file(out_json, doc);
  }
  std::cout << csv.str();
  return 0;
}

int run_sweep_kind(const ExperimentConfig& cfg) {
  const auto rows = run_sweep(cfg);
  std::ostringstream csv;
  csv << sweep_csv_header() << "\n";
  for (const auto& row : rows) csv << sweep_csv_row(row) << "\n";
  const std::string out_csv = cfg.text_or("sweep", "out_csv", "");
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  std::cout << csv.str();

  if (cfg.has("sweep", "target_gap")) {
    const double target_gap = cfg.number("sweep", "target_gap");
    const int bootstrap = static_cast<int>(cfg.number_or("sweep", "bootstrap", 400));
    const auto summary = sweep_scaling(rows, target_gap, bootstrap, 99);
    json doc = {{"record", result_record(cfg, 0.0)},
                {"t_needed_vs_n",
                 {{"slope", summary.t_needed_vs_n.slope},
                  {"ci_lo", summary.t_needed_vs_n.ci_lo},
                  {"ci_hi", summary.t_needed_vs_n.ci_hi}}},
                {"gap_vs_t",
                 {{"slope", summary.gap_vs_t.slope},
                  {"ci_lo", summary.gap_vs_t.ci_lo},
                  {"ci_hi", summary.gap_vs_t.ci_hi}}},
                {"t_needed_by_n", summary.t_needed_by_n}};
    const std::string out_json = cfg.text_or("sweep", "out_json", "");
    if (!out_json.empty()) write_json_file(out_json, doc);
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}

int run_task(const ExperimentConfig& cfg) {
  const double alpha = cfg.number_or("task", "alpha", 0.6);
  const int train_count = static_cast<int>(cfg.number_or("task", "T", 2000));
  const auto seeds = cfg.has("task", "seeds") ? cfg.numbers("task", "seeds")
                                              : std::vector<double>{1.0};
  const long long evals = static_cast<long long>(cfg.number_or("task", "evals", 3000));
  const std::string cls_name = cfg.text_or("task", "class", "gaussian-channel-iso");

  TaskSpec task;
  const std::string task_file = cfg.text_or("task", "file", "");
  if (!task_file.empty()) {
    task = task_spec_from_json(load_json_file(task_file));
  } else {
    // Built-in binary discrimination of coherent states at +-alpha with a
    // matched heterodyne readout.
    task.n = 1;
    task.state_mean.order = 1;
    task.state_mean.coeffs = {{0.0, std::numbers::sqrt2 * alpha}, {0.0, 0.0}};
    task.effect_outcome.order = 1;
    task.effect_outcome.coeffs = {{0.0, std::numbers::sqrt2 * alpha}, {0.0, 0.0}};
    task.labels = {-1.0, 1.0};
  }

  const double grid_best =
      task_grid_search_optimum(task, cfg.number_or("task", "disp_range", 2.0),
                               cfg.number_or("task", "kappa_max", 3.0),
                               static_cast<int>(cfg.number_or("task", "grid_points", 21)));

  std::ostringstream csv;
  csv << "alpha,T,seed,heldout_success,grid_optimum,shortfall\n";
  json runs = json::array();
  for (double seed_raw : seeds) {
    ErmConfig ecfg;
    ecfg.mode = ErmMode::cumulative;
    ecfg.optimizer.max_evals = evals;
    ecfg.optimizer.seed = static_cast<std::uint64_t>(seed_raw);
    const auto res = task_learning_run(task, hypothesis_class_from_name(cls_name), train_count,
                                       static_cast<std::uint64_t>(seed_raw), ecfg);
    csv << csv_number(alpha) << "," << train_count << "," << static_cast<int>(seed_raw) << ","
        << csv_number(res.heldout_success) << "," << csv_number(grid_best) << ","
        << csv_number(grid_best - res.heldout_success) << "\n";
    json rep = to_json(res.report);
    rep["heldout_success"] = res.heldout_success;
    rep["grid_optimum"] = grid_best;
    runs.push_back(std::move(rep));
  }
  const std::string out_csv = cfg.text_or("task", "out_csv", "");
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  const std::string out_json = cfg.text_or("task", "out_json", "");
  if (!out_json.empty()) write_json_file(out_json, {{"record", result_record(cfg, 0.0)},
                                                    {"runs", runs}});
  std::cout << csv.str();
  return 0;
}

int run_bound(const ExperimentConfig& cfg) {
  BoundParams p;
  p.n = static_cast<int>(cfg.number_or("bound", "n", 1));
  p.photon_cutoff = static_cast<int>(cfg.number_or("bound", "K", 1));
  p.ell = static_cast<int>(cfg.number_or("bound", "ell", 1));
  p.eps = cfg.number_or("bound", "eps", 0.1);
  p.gamma = cfg.number_or("bound", "gamma", 0.05);
  p.delta = cfg.number_or("bound", "delta", 0.01);
  p.nu = cfg.number_or("bound", "nu", 1.0);
  p.b1 = cfg.number_or("bound", "b1", 1.0);
  p.b2 = cfg.number_or("bound", "b2", 1.0);
  p.b3 = cfg.number_or("bound", "b3", 1.0);
  const auto setting = bound_setting_from_name(cfg.text_or("bound", "setting", "g"));
  const auto b = sample_complexity_bound(setting, p);
  json doc = to_json(b);
  doc["setting"] = bound_setting_name(setting);
  const std::string out_json = cfg.text_or("bound", "out_json", "");
  if (!out_json.empty()) write_json_file(out_json, doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int run_dims(const ExperimentConfig& cfg) {
  const std::string cls = cfg.text_or("dims", "class", "f_g");
  const int n = static_cast<int>(cfg.number_or("dims", "n", 1));
  const double gamma = cfg.number_or("dims", "gamma", 0.1);
  const int kmax = static_cast<int>(cfg.number_or("dims", "kmax", 4));
  const long long budget = static_cast<long long>(cfg.number_or("dims", "budget", 2e5));
  const auto seed = static_cast<std::uint64_t>(cfg.number_or("dims", "seed", 1));

  FunctionClassHandle handle;
  double bound_value = 0.0;
  if (cls == "constant") {
    handle = constant_class_handle();
    bound_value = 1.0;
  } else if (cls == "f_g") {
    handle = gaussian_state_class_handle(n);
    bound_value = pdim_upper_bound(ClassTag::f_g, n);
  } else if (cls == "f_g_disp") {
    handle = displacement_only_handle();
    bound_value = pdim_upper_bound(ClassTag::f_g, 1);
  } else if (cls == "f_gg_cat") {
    handle = cat_family_handle();
    bound_value = pdim_upper_bound(ClassTag::f_exp, 1);
  } else if (cls == "f_gp") {
    const int max_photons = 6;
    handle = photocount_class_handle(max_photons);
    bound_value = pdim_upper_bound(ClassTag::f_gp, n, max_photons);
  } else {
    throw ConfigError("unknown dims class: " + cls);
  }

  const auto result = fat_shattering_lower_bound(handle, gamma, kmax, budget, seed);
  json doc = {{"class", cls},
              {"n", n},
              {"gamma", gamma},
              {"k_certified", result.k_certified},
              {"budget_exhausted", result.budget_exhausted},
              {"evals_used", result.evals_used},
              {"bound_value", bound_value}};
  if (result.certificate) {
    json inputs = json::array();
    for (const auto& x : result.certificate->inputs) {
      json xv = json::array();
      for (int i = 0; i < x.size(); ++i) xv.push_back(x(i));
      inputs.push_back(xv);
    }
    doc["certificate"] = {{"inputs", inputs},
                          {"thresholds", result.certificate->thresholds},
                          {"worst_margin", result.certificate->worst_margin}};
  }
  if (cfg.has("dims", "eps")) {
    const double eps = cfg.number("dims", "eps");
    const int k = static_cast<int>(cfg.number_or("dims", "k", 8));
    const int samples = static_cast<int>(cfg.number_or("dims", "samples", 400));
    const auto cover = covering_number_estimate(handle, eps, k, samples, seed);
    doc["cover"] = {{"eps", eps},
                    {"k", k},
                    {"size", cover.size},
                    {"verified", cover.verified},
                    {"sampled_points", cover.sampled_points}};
  }
  const std::string out_json = cfg.text_or("dims", "out_json", "");
  if (!out_json.empty()) write_json_file(out_json, doc);
  std::ostringstream csv;
  csv << "class,n,gamma,k_certified,bound_value\n"
      << cls << "," << n << "," << csv_number(gamma) << "," << result.k_certified << ","
      << csv_number(bound_value) << "\n";
  const std::string out_csv = cfg.text_or("dims", "out_csv", "");
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  try {
    const std::string kind = cfg.text("", "kind");
    if (kind == "prob") return run_prob(cfg);
    if (kind == "learn") return run_learn(cfg);
    if (kind == "sweep") return run_sweep_kind(cfg);
    if (kind == "task") return run_task(cfg);
    if (kind == "bound") return run_bound(cfg);
    if (kind == "dims") return run_dims(cfg);
    std::cerr << "config error: unknown kind " << kind << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}

int run_config(const std::string& path) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config_file(path);
    validate_config_schema(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return run_experiment(cfg);
}

}  // namespace cvlearn
