#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "deconv/experiments.hpp"
#include "doctest.h"

using namespace deconv;

TEST_CASE("preset catalogs expose the documented scenarios") {
  const std::vector<std::string> lp = level_power_preset_names();
  CHECK(lp == std::vector<std::string>{"gauss-scale-L1", "gauss-scale-L3",
                                       "laplace-scale", "gauss-shift",
                                       "gauss-mixture", "heavy-tails"});
  const std::vector<std::string> rt = rate_preset_names();
  CHECK(rt == std::vector<std::string>{"rate-sobolev", "rate-sobolev-lap10",
                                       "rate-parametric"});
  CHECK(normality_preset_names() == std::vector<std::string>{"normality-gauss"});
  for (const std::string& name : lp) {
    const LevelPowerConfig cfg = level_power_preset(name);
    CHECK(cfg.scenario == name);
    REQUIRE_FALSE(cfg.alternatives.empty());
    // The ladder starts at the null itself so i = 1 measures level.
    CHECK(l2_distance_sq(cfg.alternatives.front(), cfg.null_model) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(cfg.n >= 100);
    CHECK(cfg.replicates >= 100);
    CHECK(cfg.calibration_replicates >= 100);
  }
  for (const std::string& name : rt) {
    const RateStudyConfig cfg = rate_preset(name);
    CHECK(cfg.scenario == name);
    CHECK(cfg.sample_sizes.size() >= 4);
    CHECK(std::is_sorted(cfg.sample_sizes.begin(), cfg.sample_sizes.end()));
  }
  CHECK_THROWS_AS(level_power_preset("nope"), std::invalid_argument);
  CHECK_THROWS_AS(rate_preset("gauss-scale-L1"), std::invalid_argument);
  CHECK_THROWS_AS(normality_preset(""), std::invalid_argument);
}

TEST_CASE("replicate rows serialize to a stable CSV") {
  std::vector<ReplicateRow> rows(2);
  rows[0] = {"demo", 1, 0, 42, 0.125, 0.5, 0};
  rows[1].scenario = "demo";
  rows[1].i = 2;
  rows[1].rep = 7;
  rows[1].seed = 43;
  rows[1].statistic = -0.25;
  std::ostringstream out;
  write_rows_csv(rows, out);
  CHECK(out.str() ==
        "scenario,i,rep,seed,statistic,threshold,decision\n"
        "demo,1,0,42,0.125,0.5,0\n"
        "demo,2,7,43,-0.25,,\n");
}

TEST_CASE("tiny level/power run: determinism, truth column, CI ordering") {
  LevelPowerConfig cfg = level_power_preset("gauss-scale-L1");
  cfg.n = 120;
  cfg.replicates = 24;
  cfg.calibration_replicates = 100;
  cfg.grid_count = 1024;

  const LevelPowerReport a = run_level_power(cfg, 314);
  const LevelPowerReport b = run_level_power(cfg, 314);
  CHECK(a.master_seed == 314);
  CHECK(a.h == b.h);
  CHECK(a.c_star == b.c_star);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].statistic == b.rows[i].statistic);
    CHECK(a.rows[i].seed == b.rows[i].seed);
  }
  const std::size_t k = cfg.alternatives.size();
  REQUIRE(a.rejection_rate.size() == k);
  REQUIRE(a.truth.size() == k);
  REQUIRE(a.mse.size() == k);
  CHECK(a.rows.size() == k * cfg.replicates);
  CHECK(a.truth.front() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::is_sorted(a.truth.begin(), a.truth.end()));  // ladder moves away
  for (const Aggregate& agg : a.rejection_rate) {
    CHECK(agg.ci_lo <= agg.value);
    CHECK(agg.value <= agg.ci_hi);
    CHECK(agg.ci_lo >= 0.0);
    CHECK(agg.ci_hi <= 1.0);
  }
  CHECK(a.threshold == doctest::Approx(a.c_star * a.t_n * a.t_n));
  CHECK(a.bandwidth_source == "schedule");
  // Different master seed changes the draws.
  const LevelPowerReport c = run_level_power(cfg, 315);
  CHECK(c.rows.front().statistic != a.rows.front().statistic);

  // Override pins the bandwidth and is reported as such.
  cfg.bandwidth_override = 0.5;
  const LevelPowerReport d = run_level_power(cfg, 314);
  CHECK(d.h == 0.5);
  CHECK(d.bandwidth_source == "override");
}

TEST_CASE("tiny rate study: rungs, slope CI, truth") {
  RateStudyConfig cfg = rate_preset("rate-parametric");
  cfg.sample_sizes = {64, 128, 256, 512};
  cfg.replicates = 30;
  cfg.grid_count = 1024;
  const RateStudyReport r = run_rate_study(cfg, 2024);
  CHECK(r.regime == Regime::parametric);
  CHECK(r.truth == doctest::Approx(density_l2_norm_sq(cfg.signal)).epsilon(1e-9));
  REQUIRE(r.rungs.size() == 4);
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    CHECK(r.rungs[i].n == cfg.sample_sizes[i]);
    CHECK(r.rungs[i].h > 0.0);
    CHECK(r.rungs[i].median_abs_error.value > 0.0);
    CHECK(r.rungs[i].median_abs_error.ci_lo <= r.rungs[i].median_abs_error.value);
    CHECK(r.rungs[i].median_abs_error.value <= r.rungs[i].median_abs_error.ci_hi);
  }
  CHECK(r.expected_slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(r.slope.ci_lo <= r.slope.value);
  CHECK(r.slope.value <= r.slope.ci_hi);
  CHECK(r.rows.size() == 4 * cfg.replicates);
  // Error shrinks with n even in a tiny run.
  CHECK(r.rungs.back().median_abs_error.value < r.rungs.front().median_abs_error.value);
  // Determinism.
  const RateStudyReport again = run_rate_study(cfg, 2024);
  CHECK(again.slope.value == r.slope.value);
}

TEST_CASE("tiny normality check fills every diagnostic") {
  NormalityConfig cfg = normality_preset("normality-gauss");
  cfg.n = 300;
  cfg.replicates = 60;
  cfg.grid_count = 1024;
  const NormalityReport r = run_normality_check(cfg, 11);
  CHECK(r.truth == doctest::Approx(density_l2_norm_sq(cfg.signal)).epsilon(1e-9));
  CHECK(r.omega_sq > 0.0);
  CHECK(r.predicted_sd_ratio >= 1.0);
  CHECK(r.ks_reference == doctest::Approx(1.36 / std::sqrt(60.0)).epsilon(1e-12));
  CHECK(r.ks_distance > 0.0);
  CHECK(r.ks_distance < 1.0);
  CHECK(r.rows.size() == 60);
  CHECK(r.mean_z.ci_lo <= r.mean_z.value);
  CHECK(r.mean_z.value <= r.mean_z.ci_hi);
  CHECK(r.var_z.value > 0.0);
  const NormalityReport again = run_normality_check(cfg, 11);
  CHECK(again.ks_distance == r.ks_distance);
  CHECK(again.rows.front().statistic == r.rows.front().statistic);
}

TEST_CASE("summary JSON embeds a config that reproduces the run") {
  LevelPowerConfig cfg = level_power_preset("gauss-shift");
  cfg.n = 100;
  cfg.replicates = 12;
  cfg.calibration_replicates = 100;
  cfg.grid_count = 1024;
  const LevelPowerReport first = run_level_power(cfg, 5);
  const std::string summary = level_power_summary_json(first);
  const LevelPowerConfig parsed = level_power_config_from_json(summary);
  CHECK(parsed.scenario == cfg.scenario);
  CHECK(parsed.n == cfg.n);
  CHECK(parsed.replicates == cfg.replicates);
  CHECK(parsed.grid_count == cfg.grid_count);
  const LevelPowerReport second = run_level_power(parsed, 5);
  CHECK(second.c_star == first.c_star);
  REQUIRE(second.rows.size() == first.rows.size());
  CHECK(second.rows.back().statistic == first.rows.back().statistic);
  // Deterministic bytes for fixed inputs.
  CHECK(level_power_summary_json(second) == summary);

  RateStudyConfig rcfg = rate_preset("rate-parametric");
  rcfg.sample_sizes = {64, 128, 256, 512};
  rcfg.replicates = 10;
  rcfg.grid_count = 1024;
  const RateStudyReport rr = run_rate_study(rcfg, 6);
  const RateStudyConfig rparsed = rate_config_from_json(rate_summary_json(rr));
  CHECK(rparsed.sample_sizes == rcfg.sample_sizes);
  CHECK(run_rate_study(rparsed, 6).slope.value == rr.slope.value);

  NormalityConfig ncfg = normality_preset("normality-gauss");
  ncfg.n = 200;
  ncfg.replicates = 40;
  ncfg.grid_count = 1024;
  const NormalityReport nr = run_normality_check(ncfg, 7);
  const NormalityConfig nparsed = normality_config_from_json(normality_summary_json(nr));
  CHECK(nparsed.n == ncfg.n);
  CHECK(run_normality_check(nparsed, 7).ks_distance == nr.ks_distance);
}
