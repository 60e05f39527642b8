#include "deconv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "deconv/errors.hpp"
#include "deconv/io.hpp"
#include "internal.hpp"
#include "json.hpp"

namespace deconv {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

//! Run fn(0..total-1), chunked over jobs threads; results must be written to
//! index-addressed slots so the output is independent of the thread count.
template <typename Fn>
void run_indexed(std::size_t total, int jobs, const Fn& fn) {
  const int threads = std::max(1, jobs);
  if (threads == 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) fn(i);
    return;
  }
  const std::size_t used = std::min<std::size_t>(static_cast<std::size_t>(threads), total);
  const std::size_t chunk = (total + used - 1) / used;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(used);
  for (std::size_t t = 0; t < used; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(total, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

Aggregate wilson_interval(std::size_t successes, std::size_t trials) {
  Aggregate out;
  if (trials == 0) return out;
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  out.value = p;
  // Clamp against roundoff at p = 0 or 1 so the interval always covers p.
  out.ci_lo = std::min(p, std::max(0.0, center - half));
  out.ci_hi = std::max(p, std::min(1.0, center + half));
  return out;
}

//! Percentile bootstrap (2.5/97.5) of a statistic of one sample.
template <typename Stat>
Aggregate bootstrap_ci(const std::vector<double>& values, const Stat& stat, Rng rng,
                       int resamples = 200) {
  Aggregate out;
  out.value = stat(values);
  if (values.size() < 2) {
    out.ci_lo = out.ci_hi = out.value;
    return out;
  }
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> draw(values.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      draw[i] = values[rng.uniform_below(values.size())];
    }
    stats[static_cast<std::size_t>(b)] = stat(draw);
  }
  std::sort(stats.begin(), stats.end());
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const std::size_t idx = static_cast<std::size_t>(pos);
    return stats[std::min(idx, stats.size() - 1)];
  };
  out.ci_lo = pick(0.025);
  out.ci_hi = pick(0.975);
  return out;
}

struct ResolvedParams {
  TestParams params;
  std::string source;
  std::string note;
};

//! Test schedule with the small-sample guard for the supersmooth/polynomial
//! cell: when the inner logarithm of the bandwidth formula is nonpositive at
//! practical n, clamp it to 0.2 log(n)/(2 alpha) instead of failing.
ResolvedParams resolve_test_params(const SmoothnessClass& cls,
                                   const SmoothnessDescriptor& noise, double n,
                                   const std::optional<double>& override_h) {
  ResolvedParams out;
  const bool ss_poly = cls.tag == SmoothnessClass::Tag::supersmooth &&
                       noise.tag == SmoothnessDescriptor::Tag::polynomial;
  if (ss_poly) {
    const double ln_n = std::log(n);
    const double inner = ln_n / (2.0 * cls.alpha) -
                         ((2.0 * noise.sigma + 0.5) / (2.0 * cls.alpha * cls.r)) *
                             std::log(ln_n);
    const double floor = 0.2 * ln_n / (2.0 * cls.alpha);
    if (inner < floor) {
      out.params.h = std::pow(floor, -1.0 / cls.r);
      out.params.t_n =
          std::pow(n, -0.5) *
          std::pow(ln_n / (2.0 * cls.alpha), (4.0 * noise.sigma + 1.0) / (4.0 * cls.r));
      out.source = "fallback_clamp";
      out.note = "bandwidth inner logarithm " + format_full(inner) +
                 " below the clamp floor at n = " + format_full(n) +
                 "; using 0.2 log(n)/(2 alpha)";
    } else {
      out.params = select_test_params(cls, noise, n);
      out.source = "schedule";
    }
  } else {
    out.params = select_test_params(cls, noise, n);
    out.source = "schedule";
  }
  if (override_h) {
    out.params.h = *override_h;
    out.source = "override";
  }
  return out;
}

json aggregate_json(const Aggregate& a) {
  return json{{"value", a.value}, {"ci_lo", a.ci_lo}, {"ci_hi", a.ci_hi}};
}

std::string kernel_name(KernelKind kind) {
  return kind == KernelKind::sinc ? "sinc" : "smoothed_trapezoid";
}

KernelKind kernel_from_name(const std::string& name) {
  if (name == "sinc") return KernelKind::sinc;
  if (name == "smoothed_trapezoid") return KernelKind::smoothed_trapezoid;
  throw std::invalid_argument("kernel: unknown kind '" + name +
                              "' (expected sinc or smoothed_trapezoid)");
}

json density_json_obj(const DensityModel& model) { return json::parse(density_to_json(model)); }

json noise_json_obj(const NoiseModel& noise) { return json::parse(noise_to_json(noise)); }

}  // namespace

void write_rows_csv(const std::vector<ReplicateRow>& rows, std::ostream& out) {
  out << "scenario,i,rep,seed,statistic,threshold,decision\n";
  for (const ReplicateRow& row : rows) {
    out << row.scenario << ',' << row.i << ',' << row.rep << ',' << row.seed << ','
        << format_full(row.statistic) << ',';
    if (row.threshold) out << format_full(*row.threshold);
    out << ',';
    if (row.decision) out << *row.decision;
    out << '\n';
  }
}

LevelPowerReport run_level_power(const LevelPowerConfig& config, std::uint64_t seed,
                                 int jobs) {
  if (config.alternatives.empty()) {
    throw std::invalid_argument("run_level_power: at least one alternative required");
  }
  if (config.n < 2) throw std::invalid_argument("run_level_power: n >= 2 required");
  if (config.replicates == 0) {
    throw std::invalid_argument("run_level_power: replicates must be positive");
  }

  LevelPowerReport report;
  report.config = config;
  report.master_seed = seed;

  const SmoothnessDescriptor descriptor = config.noise.descriptor();
  const ResolvedParams resolved = resolve_test_params(
      config.cls, descriptor, static_cast<double>(config.n), config.bandwidth_override);
  report.h = resolved.params.h;
  report.t_n = resolved.params.t_n;
  report.bandwidth_source = resolved.source;
  report.notes = resolved.note;

  TestSetup setup{config.null_model, config.noise, config.cls,
                  config.level,      config.kernel, config.grid_count};

  const Rng master(seed);
  const std::uint64_t calibration_seed = master.derive(1).lineage_seed();
  report.c_star = calibrate_cstar(setup, config.n, resolved.params,
                                  config.calibration_replicates, calibration_seed, jobs);
  report.threshold = report.c_star * report.t_n * report.t_n;

  const std::size_t n_alts = config.alternatives.size();
  const std::size_t n_reps = config.replicates;
  report.rows.resize(n_alts * n_reps);
  const KernelSpec kernel{config.kernel, report.h};

  run_indexed(n_alts * n_reps, jobs, [&](std::size_t task) {
    const std::size_t alt = task / n_reps;   // 0-based
    const std::size_t rep = task % n_reps;
    // Common random numbers: every alternative reuses the rep's stream.
    const Rng rep_base = master.derive((std::uint64_t{1} << 40) + rep);
    Rng stream = rep_base;
    const Sample draw =
        sample_observed(config.alternatives[alt], config.noise, config.n, stream);
    const double t = test_statistic(draw, config.null_model, config.noise, kernel,
                                    config.grid_count);
    ReplicateRow row;
    row.scenario = config.scenario;
    row.i = static_cast<int>(alt) + 1;
    row.rep = static_cast<int>(rep);
    row.seed = rep_base.lineage_seed();
    row.statistic = t;
    row.threshold = report.threshold;
    row.decision = decide(t, report.c_star, report.t_n) ? 1 : 0;
    report.rows[task] = std::move(row);
  });

  report.rejection_rate.resize(n_alts);
  report.truth.resize(n_alts);
  report.mse.resize(n_alts);
  for (std::size_t alt = 0; alt < n_alts; ++alt) {
    std::size_t rejections = 0;
    std::vector<double> stats(n_reps);
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const ReplicateRow& row = report.rows[alt * n_reps + rep];
      rejections += static_cast<std::size_t>(*row.decision);
      stats[rep] = row.statistic;
    }
    report.rejection_rate[alt] = wilson_interval(rejections, n_reps);
    const double truth = l2_distance_sq(config.alternatives[alt], config.null_model);
    report.truth[alt] = truth;
    std::vector<double> sq_err(n_reps);
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const double e = stats[rep] - truth;
      sq_err[rep] = e * e;
    }
    report.mse[alt] =
        bootstrap_ci(sq_err, mean_of, master.derive((std::uint64_t{2} << 40) + alt));
  }
  for (const std::string& note : config.soft_notes) {
    if (!report.notes.empty()) report.notes += "; ";
    report.notes += note;
  }
  return report;
}

RateStudyReport run_rate_study(const RateStudyConfig& config, std::uint64_t seed,
                               int jobs) {
  if (config.sample_sizes.size() < 4) {
    throw std::invalid_argument(
        "run_rate_study: at least 4 ladder rungs required for a slope fit");
  }
  if (config.replicates < 2) {
    throw std::invalid_argument("run_rate_study: at least 2 replicates per rung");
  }
  for (std::size_t i = 1; i < config.sample_sizes.size(); ++i) {
    if (config.sample_sizes[i] <= config.sample_sizes[i - 1]) {
      throw std::invalid_argument("run_rate_study: sample sizes must increase");
    }
  }

  RateStudyReport report;
  report.config = config;
  report.master_seed = seed;

  const EstimationSetup setup{config.signal.required_smoothness(),
                              config.noise.descriptor()};
  report.regime = classify_regime(setup);
  report.truth = density_l2_norm_sq(config.signal);

  const std::size_t n_rungs = config.sample_sizes.size();
  const std::size_t n_reps = config.replicates;
  std::vector<double> rung_h(n_rungs);
  for (std::size_t r = 0; r < n_rungs; ++r) {
    rung_h[r] = select_estimation_bandwidth(
        setup, static_cast<double>(config.sample_sizes[r]));
  }

  const Rng master(seed);
  report.rows.resize(n_rungs * n_reps);
  run_indexed(n_rungs * n_reps, jobs, [&](std::size_t task) {
    const std::size_t rung = task / n_reps;
    const std::size_t rep = task % n_reps;
    const Rng rep_base = master.derive((std::uint64_t{3} << 40) +
                                       (static_cast<std::uint64_t>(rung) << 32) + rep);
    Rng stream = rep_base;
    const Sample draw = sample_observed(config.signal, config.noise,
                                        config.sample_sizes[rung], stream);
    const KernelSpec kernel{config.kernel, rung_h[rung]};
    const EstimateResult est =
        estimate_d(draw, config.noise, kernel, config.grid_count);
    ReplicateRow row;
    row.scenario = config.scenario;
    row.i = static_cast<int>(rung) + 1;
    row.rep = static_cast<int>(rep);
    row.seed = rep_base.lineage_seed();
    row.statistic = est.d_n;
    report.rows[task] = std::move(row);
  });

  report.rungs.resize(n_rungs);
  std::vector<std::vector<double>> abs_err(n_rungs, std::vector<double>(n_reps));
  for (std::size_t r = 0; r < n_rungs; ++r) {
    double mse = 0.0;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const double err = report.rows[r * n_reps + rep].statistic - report.truth;
      abs_err[r][rep] = std::abs(err);
      mse += err * err;
    }
    RateRung rung;
    rung.n = config.sample_sizes[r];
    rung.h = rung_h[r];
    rung.median_abs_error =
        bootstrap_ci(abs_err[r], median_of, master.derive((std::uint64_t{4} << 40) + r));
    rung.mean_sq_error = mse / static_cast<double>(n_reps);
    report.rungs[r] = rung;
  }

  // Log-log least squares of median error on n, bootstrapped within rungs.
  const auto fit_slope = [&](const std::vector<double>& medians) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(n_rungs);
    for (std::size_t r = 0; r < n_rungs; ++r) {
      const double x = std::log(static_cast<double>(config.sample_sizes[r]));
      const double y = std::log(std::max(medians[r], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  std::vector<double> medians(n_rungs);
  for (std::size_t r = 0; r < n_rungs; ++r) {
    medians[r] = report.rungs[r].median_abs_error.value;
  }
  report.slope.value = fit_slope(medians);
  {
    Rng rng = master.derive(std::uint64_t{5} << 40);
    const int resamples = 200;
    std::vector<double> slopes(resamples);
    std::vector<double> boot_medians(n_rungs);
    std::vector<double> draw;
    for (int b = 0; b < resamples; ++b) {
      for (std::size_t r = 0; r < n_rungs; ++r) {
        draw.resize(n_reps);
        for (std::size_t i = 0; i < n_reps; ++i) {
          draw[i] = abs_err[r][rng.uniform_below(n_reps)];
        }
        boot_medians[r] = median_of(draw);
      }
      slopes[static_cast<std::size_t>(b)] = fit_slope(boot_medians);
    }
    std::sort(slopes.begin(), slopes.end());
    report.slope.ci_lo = slopes[static_cast<std::size_t>(0.025 * (resamples - 1))];
    report.slope.ci_hi = slopes[static_cast<std::size_t>(0.975 * (resamples - 1))];
  }
  std::vector<double> expected(n_rungs);
  for (std::size_t r = 0; r < n_rungs; ++r) {
    expected[r] = rate_phi(setup, static_cast<double>(config.sample_sizes[r]));
  }
  report.expected_slope = fit_slope(expected);
  return report;
}

NormalityReport run_normality_check(const NormalityConfig& config, std::uint64_t seed,
                                    int jobs) {
  if (config.n < 2) throw std::invalid_argument("run_normality_check: n >= 2 required");
  if (config.replicates < 10) {
    throw std::invalid_argument("run_normality_check: at least 10 replicates");
  }

  NormalityReport report;
  report.config = config;
  report.master_seed = seed;

  const EstimationSetup setup{config.signal.required_smoothness(),
                              config.noise.descriptor()};
  report.h = config.bandwidth_override
                 ? *config.bandwidth_override
                 : select_estimation_bandwidth(setup, static_cast<double>(config.n));
  report.truth = density_l2_norm_sq(config.signal);
  report.omega_sq = omega_sq(config.signal, config.noise);
  if (!(report.omega_sq > 0.0)) {
    throw NumericError("run_normality_check: omega^2 is zero, z-scores undefined");
  }
  const KernelSpec kernel{config.kernel, report.h};
  const VarianceSummary vs =
      variance_summary(config.signal, config.noise, kernel, config.n,
                       std::max(config.grid_count, 8192));
  report.predicted_sd_ratio = std::sqrt(
      1.0 + static_cast<double>(config.n) * vs.quartic_term / (4.0 * report.omega_sq));

  const double scale =
      std::sqrt(static_cast<double>(config.n)) / (2.0 * std::sqrt(report.omega_sq));
  const Rng master(seed);
  report.rows.resize(config.replicates);
  run_indexed(config.replicates, jobs, [&](std::size_t rep) {
    const Rng rep_base = master.derive((std::uint64_t{6} << 40) + rep);
    Rng stream = rep_base;
    const Sample draw =
        sample_observed(config.signal, config.noise, config.n, stream);
    const EstimateResult est =
        estimate_d(draw, config.noise, kernel, config.grid_count);
    ReplicateRow row;
    row.scenario = config.scenario;
    row.i = 1;
    row.rep = static_cast<int>(rep);
    row.seed = rep_base.lineage_seed();
    row.statistic = (est.d_n - report.truth) * scale;
    report.rows[rep] = std::move(row);
  });

  std::vector<double> z(config.replicates);
  for (std::size_t rep = 0; rep < config.replicates; ++rep) {
    z[rep] = report.rows[rep].statistic;
  }
  report.mean_z = bootstrap_ci(z, mean_of, master.derive(std::uint64_t{7} << 40), 400);
  report.var_z =
      bootstrap_ci(z, variance_of, master.derive((std::uint64_t{7} << 40) + 1), 400);

  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  const double n_d = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-sorted[i] / std::sqrt(2.0));
    const double hi = static_cast<double>(i + 1) / n_d - cdf;
    const double lo = cdf - static_cast<double>(i) / n_d;
    ks = std::max(ks, std::max(hi, lo));
  }
  report.ks_distance = ks;
  report.ks_reference = 1.36 / std::sqrt(n_d);
  return report;
}

// ---------------------------------------------------------------------------
// Presets.

namespace {

//! Sobolev radius that certifies the signal with 20% headroom: 1.2 times the
//! class functional (1/2pi) int |Phi|^2 |u|^{2 beta} du. For laplace_k signals
//! the functional is the Beta-function closed form
//!   (k/S^2)^{beta+1/2} B(beta+1/2, 2k-beta-1/2) / (2 pi),
//! needed because the spectral tail u^{2 beta - 4k} decays too slowly to
//! integrate numerically when beta approaches the 2k - 1/2 edge.
double sobolev_radius(const DensityModel& f, double beta) {
  if (f.kind() == "laplace_k") {
    const ModelInfo info = f.info();
    const double value =
        internal::laplace_sobolev_functional(info.k, info.scale, beta);
    if (!std::isfinite(value)) {
      throw std::invalid_argument(
          "sobolev_radius: beta must be below 2k - 1/2 for a laplace_k signal");
    }
    return 1.2 * value;
  }
  const double value = internal::half_line_integral(
      [&](double u) { return std::norm(f.cf(u)) * std::pow(std::abs(u), 2.0 * beta); },
      0.0, internal::spectral_step(f), 1e-12, 0.0, "sobolev radius");
  return 1.2 * value / (2.0 * kPi);
}

LevelPowerConfig gauss_scale_preset(const std::string& name, int noise_k) {
  LevelPowerConfig config;
  config.scenario = name;
  config.null_model = DensityModel::gaussian(1.0, 1.0);
  for (int i = 1; i <= 8; ++i) {
    config.alternatives.push_back(
        DensityModel::gaussian(1.0, 1.0 + 0.25 * (i - 1)));
  }
  config.noise = NoiseModel::laplace(noise_k, 1.0);
  config.cls = SmoothnessClass::supersmooth(0.4, 2.0, 2.0);
  config.n = 500;
  config.replicates = 100;
  config.calibration_replicates = 500;
  config.level = 0.05;
  return config;
}

LevelPowerConfig laplace_scale_preset() {
  LevelPowerConfig config;
  config.scenario = "laplace-scale";
  config.null_model = DensityModel::laplace(10, 2.0);
  for (int i = 1; i <= 8; ++i) {
    config.alternatives.push_back(DensityModel::laplace(10, 2.0 + 0.25 * (i - 1)));
  }
  config.noise = NoiseModel::laplace(1, std::sqrt(0.5));
  config.cls = SmoothnessClass::sobolev(2.0, sobolev_radius(config.null_model, 2.0));
  config.n = 500;
  config.replicates = 100;
  config.calibration_replicates = 500;
  config.level = 0.05;
  return config;
}

LevelPowerConfig gauss_shift_preset() {
  LevelPowerConfig config;
  config.scenario = "gauss-shift";
  config.null_model = DensityModel::gaussian(1.0, 1.0);
  for (int i = 1; i <= 8; ++i) {
    config.alternatives.push_back(
        DensityModel::gaussian(1.0 + 0.25 * (i - 1), 1.0));
  }
  config.noise = NoiseModel::laplace(1, std::sqrt(0.5));
  config.cls = SmoothnessClass::supersmooth(0.4, 2.0, 2.0);
  config.n = 500;
  config.replicates = 100;
  config.calibration_replicates = 500;
  config.level = 0.05;
  return config;
}

LevelPowerConfig gauss_mixture_preset() {
  LevelPowerConfig config;
  config.scenario = "gauss-mixture";
  config.null_model = DensityModel::gaussian(1.0, 1.0);
  for (int i = 1; i <= 6; ++i) {
    const double delta = 0.3 * (i - 1);
    config.alternatives.push_back(DensityModel::gaussian_mixture(
        {{0.5, 1.0 - delta, 1.0}, {0.5, 1.0 + delta, 1.0}}));
  }
  config.noise = NoiseModel::laplace(1, 1.0);
  config.cls = SmoothnessClass::supersmooth(0.4, 2.0, 2.0);
  config.n = 500;
  config.replicates = 100;
  config.calibration_replicates = 500;
  config.level = 0.05;
  config.soft_notes = {
      "soft preset: bimodal alternatives against a unimodal null, reported for "
      "texture without an acceptance gate"};
  return config;
}

LevelPowerConfig heavy_tails_preset() {
  LevelPowerConfig config;
  config.scenario = "heavy-tails";
  config.null_model = DensityModel::laplace(2, 1.0);
  for (int i = 1; i <= 6; ++i) {
    config.alternatives.push_back(DensityModel::laplace(2, 1.0 + 0.2 * (i - 1)));
  }
  config.noise = NoiseModel::laplace(1, 0.5);
  config.cls = SmoothnessClass::sobolev(2.0, sobolev_radius(config.null_model, 2.0));
  config.n = 500;
  config.replicates = 100;
  config.calibration_replicates = 500;
  config.level = 0.05;
  config.soft_notes = {
      "soft preset: exponential-tailed null, the polynomial floor constant of the "
      "tail condition degrades on wide windows"};
  return config;
}

}  // namespace

LevelPowerConfig level_power_preset(const std::string& name) {
  if (name == "gauss-scale-L1") return gauss_scale_preset(name, 1);
  if (name == "gauss-scale-L3") return gauss_scale_preset(name, 3);
  if (name == "laplace-scale") return laplace_scale_preset();
  if (name == "gauss-shift") return gauss_shift_preset();
  if (name == "gauss-mixture") return gauss_mixture_preset();
  if (name == "heavy-tails") return heavy_tails_preset();
  throw std::invalid_argument("level_power_preset: unknown preset '" + name + "'");
}

RateStudyConfig rate_preset(const std::string& name) {
  RateStudyConfig config;
  config.scenario = name;
  config.sample_sizes = {500, 1000, 2000, 4000, 8000, 16000};
  config.replicates = 200;
  config.grid_count = 2048;
  if (name == "rate-sobolev") {
    DensityModel signal = DensityModel::laplace(1, 0.5);
    config.signal =
        signal.with_smoothness(SmoothnessClass::sobolev(1.45, sobolev_radius(signal, 1.45)));
    config.noise = NoiseModel::laplace(3, 0.25);
    return config;
  }
  if (name == "rate-sobolev-lap10") {
    DensityModel signal = DensityModel::laplace(10, 2.0);
    config.signal =
        signal.with_smoothness(SmoothnessClass::sobolev(2.0, sobolev_radius(signal, 2.0)));
    config.noise = NoiseModel::laplace(1, std::sqrt(0.5));
    return config;
  }
  if (name == "rate-parametric") {
    DensityModel signal = DensityModel::gaussian(0.0, 1.0);
    config.signal = signal.with_smoothness(SmoothnessClass::supersmooth(0.4, 2.0, 2.0));
    config.noise = NoiseModel::laplace(1, 0.5);
    return config;
  }
  throw std::invalid_argument("rate_preset: unknown preset '" + name + "'");
}

NormalityConfig normality_preset(const std::string& name) {
  if (name != "normality-gauss") {
    throw std::invalid_argument("normality_preset: unknown preset '" + name + "'");
  }
  NormalityConfig config;
  config.scenario = name;
  DensityModel signal = DensityModel::gaussian(0.0, 1.0);
  config.signal = signal.with_smoothness(SmoothnessClass::supersmooth(0.4, 2.0, 2.0));
  config.noise = NoiseModel::laplace(1, 0.5);
  config.n = 2000;
  config.replicates = 500;
  config.grid_count = 4096;
  return config;
}

std::vector<std::string> level_power_preset_names() {
  return {"gauss-scale-L1", "gauss-scale-L3", "laplace-scale",
          "gauss-shift",    "gauss-mixture",  "heavy-tails"};
}

std::vector<std::string> rate_preset_names() {
  return {"rate-sobolev", "rate-sobolev-lap10", "rate-parametric"};
}

std::vector<std::string> normality_preset_names() { return {"normality-gauss"}; }

// ---------------------------------------------------------------------------
// JSON round trip.

namespace {

json level_power_config_json(const LevelPowerConfig& config) {
  json alts = json::array();
  for (const DensityModel& alt : config.alternatives) {
    alts.push_back(density_json_obj(alt));
  }
  json j{{"scenario", config.scenario},
         {"null", density_json_obj(config.null_model)},
         {"alternatives", alts},
         {"noise", noise_json_obj(config.noise)},
         {"class", class_to_spec(config.cls)},
         {"kernel", kernel_name(config.kernel)},
         {"n", config.n},
         {"replicates", config.replicates},
         {"calibration_replicates", config.calibration_replicates},
         {"level", config.level},
         {"grid_count", config.grid_count},
         {"soft_notes", config.soft_notes}};
  if (config.bandwidth_override) {
    j["bandwidth_override"] = *config.bandwidth_override;
  }
  return j;
}

json rate_config_json(const RateStudyConfig& config) {
  return json{{"scenario", config.scenario},
              {"signal", density_json_obj(config.signal)},
              {"noise", noise_json_obj(config.noise)},
              {"kernel", kernel_name(config.kernel)},
              {"sample_sizes", config.sample_sizes},
              {"replicates", config.replicates},
              {"grid_count", config.grid_count}};
}

json normality_config_json(const NormalityConfig& config) {
  json j{{"scenario", config.scenario},
         {"signal", density_json_obj(config.signal)},
         {"noise", noise_json_obj(config.noise)},
         {"kernel", kernel_name(config.kernel)},
         {"n", config.n},
         {"replicates", config.replicates},
         {"grid_count", config.grid_count}};
  if (config.bandwidth_override) j["bandwidth_override"] = *config.bandwidth_override;
  return j;
}

}  // namespace

std::string level_power_summary_json(const LevelPowerReport& report) {
  json results = json::array();
  for (std::size_t i = 0; i < report.rejection_rate.size(); ++i) {
    results.push_back(json{{"i", i + 1},
                           {"truth", report.truth[i]},
                           {"rejection_rate", aggregate_json(report.rejection_rate[i])},
                           {"mse", aggregate_json(report.mse[i])}});
  }
  const json j{{"study", "level-power"},
               {"config", level_power_config_json(report.config)},
               {"master_seed", report.master_seed},
               {"h", report.h},
               {"t_n", report.t_n},
               {"c_star", report.c_star},
               {"threshold", report.threshold},
               {"bandwidth_source", report.bandwidth_source},
               {"results", results},
               {"notes", report.notes}};
  return j.dump(2) + "\n";
}

std::string rate_summary_json(const RateStudyReport& report) {
  json rungs = json::array();
  for (const RateRung& rung : report.rungs) {
    rungs.push_back(json{{"n", rung.n},
                         {"h", rung.h},
                         {"median_abs_error", aggregate_json(rung.median_abs_error)},
                         {"mean_sq_error", rung.mean_sq_error}});
  }
  const json j{{"study", "rate"},
               {"config", rate_config_json(report.config)},
               {"master_seed", report.master_seed},
               {"truth", report.truth},
               {"regime", report.regime == Regime::parametric ? "parametric"
                                                              : "nonparametric"},
               {"expected_slope", report.expected_slope},
               {"slope", aggregate_json(report.slope)},
               {"rungs", rungs},
               {"notes", report.notes}};
  return j.dump(2) + "\n";
}

std::string normality_summary_json(const NormalityReport& report) {
  const json j{{"study", "normality"},
               {"config", normality_config_json(report.config)},
               {"master_seed", report.master_seed},
               {"h", report.h},
               {"truth", report.truth},
               {"omega_sq", report.omega_sq},
               {"predicted_sd_ratio", report.predicted_sd_ratio},
               {"mean_z", aggregate_json(report.mean_z)},
               {"var_z", aggregate_json(report.var_z)},
               {"ks_distance", report.ks_distance},
               {"ks_reference", report.ks_reference},
               {"notes", report.notes}};
  return j.dump(2) + "\n";
}

namespace {

json parse_config_root(const std::string& text) {
  json j = json::parse(text, nullptr, true, true);
  if (j.contains("config")) return j.at("config");  // accept full summaries too
  return j;
}

}  // namespace

LevelPowerConfig level_power_config_from_json(const std::string& text) {
  const json j = parse_config_root(text);
  LevelPowerConfig config;
  try {
    config.scenario = j.at("scenario").get<std::string>();
    config.null_model = parse_density_json(j.at("null").dump());
    config.alternatives.clear();
    for (const json& alt : j.at("alternatives")) {
      config.alternatives.push_back(parse_density_json(alt.dump()));
    }
    config.noise = parse_noise_json(j.at("noise").dump());
    config.cls = parse_class_spec(j.at("class").get<std::string>());
    if (j.contains("kernel")) {
      config.kernel = kernel_from_name(j.at("kernel").get<std::string>());
    }
    if (j.contains("n")) config.n = j.at("n").get<std::size_t>();
    if (j.contains("replicates")) config.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("calibration_replicates")) {
      config.calibration_replicates = j.at("calibration_replicates").get<std::size_t>();
    }
    if (j.contains("level")) config.level = j.at("level").get<double>();
    if (j.contains("grid_count")) config.grid_count = j.at("grid_count").get<int>();
    if (j.contains("bandwidth_override")) {
      config.bandwidth_override = j.at("bandwidth_override").get<double>();
    }
    if (j.contains("soft_notes")) {
      config.soft_notes = j.at("soft_notes").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("level-power config: ") + e.what());
  }
  return config;
}

RateStudyConfig rate_config_from_json(const std::string& text) {
  const json j = parse_config_root(text);
  RateStudyConfig config;
  try {
    config.scenario = j.at("scenario").get<std::string>();
    config.signal = parse_density_json(j.at("signal").dump());
    config.noise = parse_noise_json(j.at("noise").dump());
    if (j.contains("kernel")) {
      config.kernel = kernel_from_name(j.at("kernel").get<std::string>());
    }
    config.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("replicates")) config.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("grid_count")) config.grid_count = j.at("grid_count").get<int>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("rate config: ") + e.what());
  }
  return config;
}

NormalityConfig normality_config_from_json(const std::string& text) {
  const json j = parse_config_root(text);
  NormalityConfig config;
  try {
    config.scenario = j.at("scenario").get<std::string>();
    config.signal = parse_density_json(j.at("signal").dump());
    config.noise = parse_noise_json(j.at("noise").dump());
    if (j.contains("kernel")) {
      config.kernel = kernel_from_name(j.at("kernel").get<std::string>());
    }
    if (j.contains("n")) config.n = j.at("n").get<std::size_t>();
    if (j.contains("replicates")) config.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("grid_count")) config.grid_count = j.at("grid_count").get<int>();
    if (j.contains("bandwidth_override")) {
      config.bandwidth_override = j.at("bandwidth_override").get<double>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("normality config: ") + e.what());
  }
  return config;
}

}  // namespace deconv
