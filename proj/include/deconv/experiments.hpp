#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deconv/gof.hpp"

namespace deconv {

//! One Monte Carlo record. A single CSV schema serves every study: estimation
//! studies leave threshold/decision unset (empty cells).
struct ReplicateRow {
  std::string scenario;
  int i = 0;    // alternative index or ladder rung (1-based)
  int rep = 0;  // replicate index (0-based)
  std::uint64_t seed = 0;
  double statistic = 0.0;  // T_n or d_n
  std::optional<double> threshold;
  std::optional<int> decision;
};

void write_rows_csv(const std::vector<ReplicateRow>& rows, std::ostream& out);

//! Aggregate with its uncertainty; no bare point estimates leave this module.
struct Aggregate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// ---------------------------------------------------------------------------
// Level/power and MSE studies (one null, a ladder of alternatives).

struct LevelPowerConfig {
  std::string scenario;
  DensityModel null_model = DensityModel::gaussian(0.0, 1.0);
  std::vector<DensityModel> alternatives;  // alternatives[0] is i=1 (the null)
  NoiseModel noise;
  SmoothnessClass cls;
  KernelKind kernel = KernelKind::smoothed_trapezoid;
  std::size_t n = 500;
  std::size_t replicates = 100;              // N per alternative
  std::size_t calibration_replicates = 500;  // B
  double level = 0.05;
  std::optional<double> bandwidth_override;
  int grid_count = 4096;
  std::vector<std::string> soft_notes;  // reported, non-failing observations
};

struct LevelPowerReport {
  LevelPowerConfig config;
  std::uint64_t master_seed = 0;
  double h = 0.0, t_n = 0.0, c_star = 0.0, threshold = 0.0;
  std::string bandwidth_source;  // "schedule" | "fallback_clamp" | "override"
  std::vector<ReplicateRow> rows;
  std::vector<Aggregate> rejection_rate;  // per i, binomial CI
  std::vector<double> truth;              // ||f_i - f_0||^2 per i
  std::vector<Aggregate> mse;             // per i, bootstrap CI
  std::string notes;
};

LevelPowerReport run_level_power(const LevelPowerConfig& config, std::uint64_t seed,
                                 int jobs = 1);

// ---------------------------------------------------------------------------
// Rate study: median |d_n - d| over an n-ladder, log-log slope.

struct RateStudyConfig {
  std::string scenario;
  DensityModel signal =  // smoothness class attached
      DensityModel::gaussian(0.0, 1.0).with_smoothness(SmoothnessClass::sobolev(1.0, 1.0));
  NoiseModel noise;
  KernelKind kernel = KernelKind::smoothed_trapezoid;
  std::vector<std::size_t> sample_sizes;  // >= 4 rungs, roughly geometric
  std::size_t replicates = 200;           // per rung
  int grid_count = 4096;
};

struct RateRung {
  std::size_t n = 0;
  double h = 0.0;
  Aggregate median_abs_error;  // bootstrap CI
  double mean_sq_error = 0.0;
};

struct RateStudyReport {
  RateStudyConfig config;
  std::uint64_t master_seed = 0;
  double truth = 0.0;  // int f^2
  Regime regime = Regime::nonparametric;
  double expected_slope = 0.0;  // from the rate formula over the ladder
  Aggregate slope;              // least-squares fit, bootstrap CI
  std::vector<RateRung> rungs;
  std::vector<ReplicateRow> rows;
  std::string notes;
};

RateStudyReport run_rate_study(const RateStudyConfig& config, std::uint64_t seed,
                               int jobs = 1);

// ---------------------------------------------------------------------------
// Normality check: standardized sqrt(n) (d_n - d)/(2 omega) against N(0,1).

struct NormalityConfig {
  std::string scenario;
  DensityModel signal =  // smoothness class attached
      DensityModel::gaussian(0.0, 1.0).with_smoothness(SmoothnessClass::sobolev(1.0, 1.0));
  NoiseModel noise;
  KernelKind kernel = KernelKind::smoothed_trapezoid;
  std::size_t n = 2000;
  std::size_t replicates = 500;
  std::optional<double> bandwidth_override;
  int grid_count = 4096;
};

struct NormalityReport {
  NormalityConfig config;
  std::uint64_t master_seed = 0;
  double h = 0.0;
  double truth = 0.0;     // d = int f^2
  double omega_sq = 0.0;  // efficiency constant
  double predicted_sd_ratio = 0.0;  // sqrt(1 + n * quartic / (4 omega^2))
  Aggregate mean_z;
  Aggregate var_z;
  double ks_distance = 0.0;
  double ks_reference = 0.0;  // 1.36/sqrt(N), for context
  std::vector<ReplicateRow> rows;
  std::string notes;
};

NormalityReport run_normality_check(const NormalityConfig& config, std::uint64_t seed,
                                    int jobs = 1);

// ---------------------------------------------------------------------------
// Presets: the simulation-study scenarios plus rate/normality configurations.
// Level/power: gauss-scale-L1, gauss-scale-L3, laplace-scale, gauss-shift,
// and the soft presets gauss-mixture, heavy-tails.
// Rate: rate-sobolev, rate-sobolev-lap10, rate-parametric.
// Normality: normality-gauss.

LevelPowerConfig level_power_preset(const std::string& name);
RateStudyConfig rate_preset(const std::string& name);
NormalityConfig normality_preset(const std::string& name);

std::vector<std::string> level_power_preset_names();
std::vector<std::string> rate_preset_names();
std::vector<std::string> normality_preset_names();

// ---------------------------------------------------------------------------
// JSON serialization (deterministic byte output for fixed inputs). Summaries
// embed the resolved config; configs parse back to identical runs.

std::string level_power_summary_json(const LevelPowerReport& report);
std::string rate_summary_json(const RateStudyReport& report);
std::string normality_summary_json(const NormalityReport& report);

LevelPowerConfig level_power_config_from_json(const std::string& text);
RateStudyConfig rate_config_from_json(const std::string& text);
NormalityConfig normality_config_from_json(const std::string& text);

}  // namespace deconv
