#pragma once

#include <string>
#include <vector>

#include "cvlearn/config.hpp"

namespace cvlearn {

/// One learn-state run inside a sweep.
struct SweepRow {
  std::string setting;
  int n = 0;
  int train_count = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;        // mean held-out loss
  double gap_q50 = 0.0;
  double gap_q95 = 0.0;
  double exceed_frac = 0.0;
  double wall_ms = 0.0;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

/// Worker-pool execution of a sweep grid; rows come back ordered by job
/// index regardless of scheduling. Thread count honors CVLEARN_THREADS.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct ScalingFit {
  double slope = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int points = 0;
};

/// Least-squares slope of log(y) against log(x) with a seed-bootstrap CI.
ScalingFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<std::vector<double>>& per_seed_ys, int bootstrap,
                            std::uint64_t seed);

/// Smallest training size in the sweep whose exceedance hits the target,
/// log-interpolated between grid points; per (n, seed).
struct ScalingSummary {
  ScalingFit t_needed_vs_n;    // slope of log T* against log n
  ScalingFit gap_vs_t;         // slope of log gap against log T
  std::vector<double> t_needed_by_n;
};

ScalingSummary sweep_scaling(const std::vector<SweepRow>& rows, double target_gap, int bootstrap,
                             std::uint64_t seed);

/// Executes an already-validated config.
int run_experiment(const ExperimentConfig& cfg);

/// Parses, validates, and executes a config file; returns the process exit
/// code and writes the declared outputs. Exit codes: 0 ok, 1 runtime
/// failure, 2 config error.
int run_config(const std::string& path);

}  // namespace cvlearn
