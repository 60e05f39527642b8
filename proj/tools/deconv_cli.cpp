// Command-line surface for the deconvolution toolkit. Subcommands wire the
// library to files and stdout; every stochastic subcommand requires an
// explicit --seed (there is no wall-clock default). Exit codes: 0 success,
// 2 configuration error (message names the field), 3 numerical failure
// (message names the operation).
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "deconv/adversarial.hpp"
#include "deconv/errors.hpp"
#include "deconv/experiments.hpp"
#include "deconv/functional.hpp"
#include "deconv/gof.hpp"
#include "deconv/io.hpp"
#include "deconv/models.hpp"
#include "deconv/rng.hpp"

namespace {

using nlohmann::json;
using namespace deconv;

KernelKind kernel_from_flag(const std::string& name) {
  if (name == "sinc") return KernelKind::sinc;
  if (name == "trapezoid" || name == "smoothed_trapezoid")
    return KernelKind::smoothed_trapezoid;
  throw std::invalid_argument("kernel: unknown kind '" + name +
                              "' (expected sinc or trapezoid)");
}

const char* kernel_flag_name(KernelKind kind) {
  return kind == KernelKind::sinc ? "sinc" : "trapezoid";
}

Sample sample_from_file(const std::string& path) {
  Sample sample;
  sample.values = read_data_file(path);
  if (sample.values.size() < 2) {
    throw std::invalid_argument("data: n >= 2 required, file '" + path + "' has " +
                                std::to_string(sample.values.size()) + " value(s)");
  }
  return sample;
}

void require_seed(bool seed_given, const char* subcommand) {
  if (!seed_given) {
    throw std::invalid_argument(std::string(subcommand) +
                                ": --seed is required (stochastic subcommand)");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("out: cannot open '" + path + "' for writing");
  out << text;
}

void write_csv_file(const std::string& path, const std::vector<ReplicateRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("out: cannot open '" + path + "' for writing");
  write_rows_csv(rows, out);
}

std::string format_aggregate(const Aggregate& a) {
  std::ostringstream s;
  s.precision(6);
  s << a.value << " [" << a.ci_lo << ", " << a.ci_hi << "]";
  return s.str();
}

// Shared flag bundle for the three experiment runners.
struct StudyFlags {
  std::string preset;
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_csv;
  std::string out_json;
  bool list_presets = false;
};

void add_study_flags(CLI::App* sub, StudyFlags& flags) {
  sub->add_option("--preset", flags.preset, "Named preset configuration");
  sub->add_option("--config", flags.config, "Config as JSON text or a path to one");
  sub->add_option("--seed", flags.seed, "Master seed (required)");
  sub->add_option("--jobs", flags.jobs, "Worker threads")
      ->envname("DECONV_JOBS")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out-csv", flags.out_csv, "Write per-replicate rows as CSV");
  sub->add_option("--out-json", flags.out_json, "Write the summary as JSON");
  sub->add_flag("--list-presets", flags.list_presets, "List preset names and exit");
}

template <typename Config, typename Preset, typename Parse>
Config resolve_study_config(const StudyFlags& flags, Preset preset_fn, Parse parse_fn,
                            const char* subcommand) {
  const bool has_preset = !flags.preset.empty();
  const bool has_config = !flags.config.empty();
  if (has_preset == has_config) {
    throw std::invalid_argument(std::string(subcommand) +
                                ": exactly one of --preset or --config is required");
  }
  if (has_preset) return preset_fn(flags.preset);
  return parse_fn(load_inline_or_file(flags.config));
}

int run_level_power_cli(const StudyFlags& flags, bool seed_given, bool mse_focus) {
  const char* name = mse_focus ? "mse-study" : "power-study";
  if (flags.list_presets) {
    for (const std::string& preset : level_power_preset_names())
      std::cout << preset << "\n";
    return 0;
  }
  require_seed(seed_given, name);
  const LevelPowerConfig config = resolve_study_config<LevelPowerConfig>(
      flags, level_power_preset, level_power_config_from_json, name);
  const LevelPowerReport report = run_level_power(config, flags.seed, flags.jobs);

  std::cout.precision(6);
  std::cout << "scenario: " << report.config.scenario << "\n"
            << "n = " << report.config.n << ", replicates = " << report.config.replicates
            << ", calibration = " << report.config.calibration_replicates
            << ", level = " << report.config.level << "\n"
            << "h = " << report.h << " (" << report.bandwidth_source << ")"
            << ", t_n = " << report.t_n << ", C* = " << report.c_star
            << ", threshold = " << report.threshold << "\n";
  if (!report.notes.empty()) std::cout << "note: " << report.notes << "\n";
  for (std::size_t i = 0; i < report.rejection_rate.size(); ++i) {
    std::cout << "i = " << (i + 1) << ": ||f_i - f_0||^2 = " << report.truth[i];
    if (mse_focus) {
      std::cout << ", mse(T) = " << format_aggregate(report.mse[i]);
      std::cout << ", rejection rate = " << report.rejection_rate[i].value;
    } else {
      std::cout << ", rejection rate = " << format_aggregate(report.rejection_rate[i]);
      std::cout << ", mse(T) = " << report.mse[i].value;
    }
    std::cout << "\n";
  }

  if (!flags.out_csv.empty()) write_csv_file(flags.out_csv, report.rows);
  if (!flags.out_json.empty())
    write_text_file(flags.out_json, level_power_summary_json(report));
  return 0;
}

int run_rate_study_cli(const StudyFlags& flags, bool seed_given) {
  if (flags.list_presets) {
    for (const std::string& preset : rate_preset_names()) std::cout << preset << "\n";
    return 0;
  }
  require_seed(seed_given, "rate-study");
  const RateStudyConfig config = resolve_study_config<RateStudyConfig>(
      flags, rate_preset, rate_config_from_json, "rate-study");
  const RateStudyReport report = run_rate_study(config, flags.seed, flags.jobs);

  std::cout.precision(6);
  std::cout << "scenario: " << report.config.scenario << "\n"
            << "truth: int f^2 = " << report.truth << ", regime = "
            << (report.regime == Regime::parametric ? "parametric" : "nonparametric")
            << "\n";
  for (const RateRung& rung : report.rungs) {
    std::cout << "n = " << rung.n << ": h = " << rung.h << ", median |d_n - d| = "
              << format_aggregate(rung.median_abs_error)
              << ", mse = " << rung.mean_sq_error << "\n";
  }
  std::cout << "slope = " << format_aggregate(report.slope)
            << ", expected = " << report.expected_slope << "\n";
  if (!report.notes.empty()) std::cout << "note: " << report.notes << "\n";

  if (!flags.out_csv.empty()) write_csv_file(flags.out_csv, report.rows);
  if (!flags.out_json.empty()) write_text_file(flags.out_json, rate_summary_json(report));
  return 0;
}

int run_normality_cli(const StudyFlags& flags, bool seed_given) {
  if (flags.list_presets) {
    for (const std::string& preset : normality_preset_names())
      std::cout << preset << "\n";
    return 0;
  }
  require_seed(seed_given, "normality-check");
  const NormalityConfig config = resolve_study_config<NormalityConfig>(
      flags, normality_preset, normality_config_from_json, "normality-check");
  const NormalityReport report = run_normality_check(config, flags.seed, flags.jobs);

  std::cout.precision(6);
  std::cout << "scenario: " << report.config.scenario << "\n"
            << "n = " << report.config.n << ", replicates = "
            << report.config.replicates << ", h = " << report.h << "\n"
            << "d = " << report.truth << ", omega^2 = " << report.omega_sq
            << ", predicted sd ratio = " << report.predicted_sd_ratio << "\n"
            << "mean z = " << format_aggregate(report.mean_z) << "\n"
            << "var z = " << format_aggregate(report.var_z) << "\n"
            << "KS distance = " << report.ks_distance
            << " (1.36/sqrt(N) = " << report.ks_reference << ")\n";
  if (!report.notes.empty()) std::cout << "note: " << report.notes << "\n";

  if (!flags.out_csv.empty()) write_csv_file(flags.out_csv, report.rows);
  if (!flags.out_json.empty())
    write_text_file(flags.out_json, normality_summary_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Estimate the quadratic functional int f^2 and run L2 goodness-of-fit "
      "tests for a density observed through additive noise."};
  app.require_subcommand(1);

  int exit_code = 0;

  // --- estimate ------------------------------------------------------------
  struct {
    std::string data, noise, cls, kernel = "trapezoid", out;
    std::optional<double> bandwidth;
    int grid = 4096;
    std::uint64_t seed = 0;  // accepted for interface uniformity, unused
  } est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Estimate d = int f^2 from a data file (deterministic)");
  estimate->add_option("--data", est.data, "Observations, one value per line")
      ->required();
  estimate->add_option("--noise", est.noise, "Noise model JSON or path")->required();
  estimate->add_option("--class", est.cls,
                       "Smoothness class, e.g. sobolev:beta=1,L=1 (schedules h)");
  estimate->add_option("--bandwidth", est.bandwidth, "Explicit bandwidth h > 0");
  estimate->add_option("--kernel", est.kernel, "sinc | trapezoid");
  estimate->add_option("--grid", est.grid, "Quadrature grid size")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est.seed, "Ignored; estimation is deterministic");
  estimate->add_option("--out", est.out, "Write a JSON summary");
  estimate->callback([&] {
    const Sample sample = sample_from_file(est.data);
    const NoiseModel noise = parse_noise_json(load_inline_or_file(est.noise));
    const KernelKind kind = kernel_from_flag(est.kernel);
    EstimateResult result;
    std::optional<SmoothnessClass> cls;
    if (!est.cls.empty()) {
      cls = parse_class_spec(est.cls);
      const EstimationSetup setup{*cls, noise.descriptor()};
      result = estimate_d(sample, noise, setup, kind, est.grid);
    } else if (est.bandwidth) {
      if (!(*est.bandwidth > 0.0)) {
        throw std::invalid_argument("bandwidth: must be positive");
      }
      result = estimate_d(sample, noise, KernelSpec{kind, *est.bandwidth}, est.grid);
    } else {
      throw std::invalid_argument(
          "estimate: provide --class (scheduled bandwidth) or --bandwidth");
    }

    std::cout.precision(10);
    std::cout << "d_n = " << result.d_n << "\n"
              << "h = " << result.h << "\n"
              << "n = " << result.n << "\n";
    if (result.regime) {
      std::cout << "regime = "
                << (*result.regime == Regime::parametric ? "parametric"
                                                         : "nonparametric")
                << "\n";
    }
    if (result.bias_bound) std::cout << "bias bound = " << *result.bias_bound << "\n";
    if (result.variance_proxy)
      std::cout << "variance proxy = " << *result.variance_proxy << "\n";

    if (!est.out.empty()) {
      json j{{"d_n", result.d_n},
             {"h", result.h},
             {"n", result.n},
             {"config",
              {{"data", est.data},
               {"noise", json::parse(noise_to_json(noise))},
               {"kernel", kernel_flag_name(kind)},
               {"grid", est.grid}}}};
      if (cls) j["config"]["class"] = class_to_spec(*cls);
      if (result.regime) {
        j["regime"] =
            *result.regime == Regime::parametric ? "parametric" : "nonparametric";
      }
      if (result.bias_bound) j["bias_bound"] = *result.bias_bound;
      if (result.variance_proxy) j["variance_proxy"] = *result.variance_proxy;
      write_text_file(est.out, j.dump(2) + "\n");
    }
  });

  // --- gof-test --------------------------------------------------------
  struct {
    std::string data, noise, null_model, cls, kernel = "trapezoid", out;
    double level = 0.05;
    std::size_t replicates = 500;
    int grid = 4096;
    std::uint64_t seed = 0;
    int jobs = 1;
  } gof;
  CLI::App* gof_test = app.add_subcommand(
      "gof-test", "Test H0: f = f_0 from a data file (calibrated threshold)");
  gof_test->add_option("--data", gof.data, "Observations, one value per line")
      ->required();
  gof_test->add_option("--noise", gof.noise, "Noise model JSON or path")->required();
  gof_test->add_option("--null", gof.null_model, "Null density JSON or path")
      ->required();
  gof_test->add_option("--class", gof.cls, "Smoothness class spec")->required();
  gof_test->add_option("--level", gof.level, "Test level xi in (0,1)");
  gof_test->add_option("--kernel", gof.kernel, "sinc | trapezoid");
  gof_test->add_option("--replicates", gof.replicates,
                       "Calibration bootstrap replicates (>= 100)");
  gof_test->add_option("--grid", gof.grid, "Quadrature grid size")
      ->check(CLI::PositiveNumber);
  CLI::Option* gof_seed =
      gof_test->add_option("--seed", gof.seed, "Calibration seed (required)");
  gof_test->add_option("--jobs", gof.jobs, "Worker threads")
      ->envname("DECONV_JOBS")
      ->check(CLI::PositiveNumber);
  gof_test->add_option("--out", gof.out, "Write a JSON summary");
  gof_test->callback([&] {
    require_seed(gof_seed->count() > 0, "gof-test");
    const Sample sample = sample_from_file(gof.data);
    const NoiseModel noise = parse_noise_json(load_inline_or_file(gof.noise));
    const DensityModel null_model =
        parse_density_json(load_inline_or_file(gof.null_model));
    const SmoothnessClass cls = parse_class_spec(gof.cls);
    const KernelKind kind = kernel_from_flag(gof.kernel);
    const TestSetup setup{null_model, noise, cls, gof.level, kind, gof.grid};
    const TestOutcome outcome =
        run_gof_test(sample, setup, gof.replicates, gof.seed, gof.jobs);

    std::cout.precision(10);
    std::cout << "T = " << outcome.statistic << "\n"
              << "h = " << outcome.h << "\n"
              << "t_n = " << outcome.t_n << "\n"
              << "C* = " << outcome.c_star << "\n"
              << "threshold = " << outcome.threshold << "\n"
              << "decision = " << (outcome.reject ? "reject" : "accept") << "\n";

    if (!gof.out.empty()) {
      const json j{{"statistic", outcome.statistic},
                   {"h", outcome.h},
                   {"t_n", outcome.t_n},
                   {"c_star", outcome.c_star},
                   {"threshold", outcome.threshold},
                   {"reject", outcome.reject},
                   {"calibration_replicates", outcome.calibration_replicates},
                   {"calibration_seed", outcome.calibration_seed},
                   {"config",
                    {{"data", gof.data},
                     {"noise", json::parse(noise_to_json(noise))},
                     {"null", json::parse(density_to_json(null_model))},
                     {"class", class_to_spec(cls)},
                     {"level", gof.level},
                     {"kernel", kernel_flag_name(kind)},
                     {"grid", gof.grid},
                     {"seed", gof.seed}}}};
      write_text_file(gof.out, j.dump(2) + "\n");
    }
  });

  // --- simulate --------------------------------------------------------
  struct {
    std::string density, noise, out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
  } sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Draw Y = X + eps observations to a file");
  simulate->add_option("--density", sim.density, "Signal density JSON or path")
      ->required();
  simulate->add_option("--noise", sim.noise,
                       "Noise model JSON or path (default: none)");
  simulate->add_option("--n", sim.n, "Number of observations")
      ->required()
      ->check(CLI::PositiveNumber);
  CLI::Option* sim_seed = simulate->add_option("--seed", sim.seed, "Seed (required)");
  simulate->add_option("--out", sim.out, "Output path (default: stdout)");
  simulate->callback([&] {
    require_seed(sim_seed->count() > 0, "simulate");
    const DensityModel model = parse_density_json(load_inline_or_file(sim.density));
    const NoiseModel noise = sim.noise.empty()
                                 ? NoiseModel::none()
                                 : parse_noise_json(load_inline_or_file(sim.noise));
    Rng rng(sim.seed);
    const Sample sample = sample_observed(model, noise, sim.n, rng);
    std::ostringstream text;
    text << "# seed=" << sim.seed << " n=" << sim.n << "\n";
    char buffer[64];
    for (double y : sample.values) {
      std::snprintf(buffer, sizeof buffer, "%.17g\n", y);
      text << buffer;
    }
    if (sim.out.empty()) {
      std::cout << text.str();
    } else {
      write_text_file(sim.out, text.str());
    }
  });

  // --- experiment runners ----------------------------------------------
  StudyFlags power_flags;
  CLI::App* power = app.add_subcommand(
      "power-study", "Level/power Monte Carlo over an alternative ladder");
  add_study_flags(power, power_flags);
  power->callback([&] {
    exit_code = run_level_power_cli(power_flags, power->count("--seed") > 0, false);
  });

  StudyFlags mse_flags;
  CLI::App* mse = app.add_subcommand(
      "mse-study", "Statistic MSE Monte Carlo over an alternative ladder");
  add_study_flags(mse, mse_flags);
  mse->callback(
      [&] { exit_code = run_level_power_cli(mse_flags, mse->count("--seed") > 0, true); });

  StudyFlags rate_flags;
  CLI::App* rate =
      app.add_subcommand("rate-study", "Median-error rate study over an n-ladder");
  add_study_flags(rate, rate_flags);
  rate->callback(
      [&] { exit_code = run_rate_study_cli(rate_flags, rate->count("--seed") > 0); });

  StudyFlags norm_flags;
  CLI::App* norm = app.add_subcommand(
      "normality-check", "Standardized-estimator normality diagnostics");
  add_study_flags(norm, norm_flags);
  norm->callback(
      [&] { exit_code = run_normality_cli(norm_flags, norm->count("--seed") > 0); });

  // --- calibrate ---------------------------------------------------------
  struct {
    std::string noise, null_model, cls, kernel = "trapezoid", out;
    double level = 0.05;
    std::size_t n = 0, replicates = 500;
    int grid = 4096;
    std::uint64_t seed = 0;
    int jobs = 1;
  } cal;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Parametric-bootstrap critical value C* for a test setup");
  calibrate->add_option("--null", cal.null_model, "Null density JSON or path")
      ->required();
  calibrate->add_option("--noise", cal.noise, "Noise model JSON or path")->required();
  calibrate->add_option("--class", cal.cls, "Smoothness class spec")->required();
  calibrate->add_option("--n", cal.n, "Sample size per replicate")
      ->required()
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--level", cal.level, "Test level xi in (0,1)");
  calibrate->add_option("--kernel", cal.kernel, "sinc | trapezoid");
  calibrate->add_option("--replicates", cal.replicates,
                        "Bootstrap replicates (>= 100)");
  calibrate->add_option("--grid", cal.grid, "Quadrature grid size")
      ->check(CLI::PositiveNumber);
  CLI::Option* cal_seed =
      calibrate->add_option("--seed", cal.seed, "Seed (required)");
  calibrate->add_option("--jobs", cal.jobs, "Worker threads")
      ->envname("DECONV_JOBS")
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--out", cal.out, "Write a JSON summary");
  calibrate->callback([&] {
    require_seed(cal_seed->count() > 0, "calibrate");
    if (cal.n < 2) throw std::invalid_argument("n: n >= 2 required");
    const NoiseModel noise = parse_noise_json(load_inline_or_file(cal.noise));
    const DensityModel null_model =
        parse_density_json(load_inline_or_file(cal.null_model));
    const SmoothnessClass cls = parse_class_spec(cal.cls);
    const KernelKind kind = kernel_from_flag(cal.kernel);
    const TestParams params =
        select_test_params(cls, noise.descriptor(), static_cast<double>(cal.n));
    const TestSetup setup{null_model, noise, cls, cal.level, kind, cal.grid};
    const double c_star =
        calibrate_cstar(setup, cal.n, params, cal.replicates, cal.seed, cal.jobs);

    std::cout.precision(10);
    std::cout << "h = " << params.h << "\n"
              << "t_n = " << params.t_n << "\n"
              << "C* = " << c_star << "\n"
              << "threshold = " << c_star * params.t_n * params.t_n << "\n";

    if (!cal.out.empty()) {
      const json j{{"c_star", c_star},
                   {"h", params.h},
                   {"t_n", params.t_n},
                   {"threshold", c_star * params.t_n * params.t_n},
                   {"config",
                    {{"noise", json::parse(noise_to_json(noise))},
                     {"null", json::parse(density_to_json(null_model))},
                     {"class", class_to_spec(cls)},
                     {"level", cal.level},
                     {"kernel", kernel_flag_name(kind)},
                     {"n", cal.n},
                     {"replicates", cal.replicates},
                     {"seed", cal.seed}}}};
      write_text_file(cal.out, j.dump(2) + "\n");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
