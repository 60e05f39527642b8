#include "deconv/gof.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "deconv/errors.hpp"
#include "internal.hpp"

namespace deconv {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TestParams select_test_params(const SmoothnessClass& cls,
                              const SmoothnessDescriptor& noise, double n) {
  if (!(n >= 2.0)) throw std::invalid_argument("select_test_params: n >= 2 required");
  const double ln_n = std::log(n);
  const bool sobolev = cls.tag == SmoothnessClass::Tag::sobolev;
  const bool polynomial = noise.tag == SmoothnessDescriptor::Tag::polynomial;
  TestParams out;
  if (sobolev && polynomial) {
    const double denom = 4.0 * cls.beta + 4.0 * noise.sigma + 1.0;
    out.h = std::pow(n, -2.0 / denom);
    out.t_n = std::pow(n, -2.0 * cls.beta / denom);
    return out;
  }
  if (!sobolev && polynomial) {
    const double inner = ln_n / (2.0 * cls.alpha) -
                         ((2.0 * noise.sigma + 0.5) / (2.0 * cls.alpha * cls.r)) *
                             std::log(ln_n);
    if (!(inner > 0.0)) {
      throw std::invalid_argument(
          "select_test_params: n too small for the supersmooth/polynomial schedule "
          "(inner logarithm nonpositive)");
    }
    out.h = std::pow(inner, -1.0 / cls.r);
    out.t_n = std::pow(n, -0.5) *
              std::pow(ln_n / (2.0 * cls.alpha), (4.0 * noise.sigma + 1.0) / (4.0 * cls.r));
    return out;
  }
  if (sobolev) {  // exponential noise
    const double base = ln_n / (2.0 * noise.gamma);
    const double inner =
        base -
        ((2.0 * cls.beta + 1.0) / (2.0 * noise.gamma * noise.s)) * std::log(base);
    if (!(base > 0.0) || !(inner > 0.0)) {
      throw std::invalid_argument(
          "select_test_params: n too small for the sobolev/exponential schedule "
          "(inner logarithm nonpositive)");
    }
    out.h = std::pow(inner, -1.0 / noise.s);
    out.t_n = std::sqrt(cls.radius) * std::pow(base, -cls.beta / noise.s);
    return out;
  }
  // supersmooth class, exponential noise
  out.h = solve_eq22(cls.alpha, cls.r, noise.gamma, noise.s, n);
  if (cls.r < noise.s) {
    out.t_n = std::sqrt(cls.radius) * std::exp(-cls.alpha / std::pow(out.h, cls.r));
  } else {
    out.t_n = std::pow(out.h, std::min(noise.s - 1.0, 0.0) / 4.0) *
              std::exp(noise.gamma / std::pow(out.h, noise.s)) / std::sqrt(n);
  }
  return out;
}

double test_statistic(const Sample& sample, const DensityModel& null_model,
                      const NoiseModel& noise, const KernelSpec& kernel,
                      int grid_count) {
  return internal::integral_statistic(sample.values, noise, kernel, &null_model,
                                      grid_count);
}

double test_statistic_pairwise_oracle(const Sample& sample,
                                      const DensityModel& null_model,
                                      const NoiseModel& noise, const KernelSpec& kernel,
                                      int grid_count, std::size_t oracle_cap) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("pairwise oracle: n >= 2 required");
  if (n > oracle_cap) {
    throw std::invalid_argument("pairwise oracle: n exceeds the oracle cap of " +
                                std::to_string(oracle_cap));
  }
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  const double du = grid.du();
  const std::size_t nodes = static_cast<std::size_t>(half) + 1;
  // a_k(u_m) = e^{i u_m Y_k} w(u_m) - Phi_0(u_m) tabulated per observation.
  std::vector<complex> w(nodes), phi0(nodes);
  for (int m = 0; m <= half; ++m) {
    const double u = m * du;
    w[static_cast<std::size_t>(m)] = deconv_weight(u, kernel, noise);
    phi0[static_cast<std::size_t>(m)] = null_model.cf(u);
  }
  std::vector<std::vector<complex>> a(n, std::vector<complex>(nodes));
  for (std::size_t k = 0; k < n; ++k) {
    const complex step = std::polar(1.0, du * sample.values[k]);
    complex c(1.0, 0.0);
    a[k][0] = w[0] - phi0[0];
    for (int m = 1; m <= half; ++m) {
      c *= step;
      a[k][static_cast<std::size_t>(m)] =
          c * w[static_cast<std::size_t>(m)] - phi0[static_cast<std::size_t>(m)];
    }
  }
  complex total(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (k == l) continue;
      // int_{-U}^{U} a_k conj(a_l) du; the integrand is Hermitian in u, so the
      // negative half folds onto twice the real part of the positive half.
      const complex f0 = a[k][0] * std::conj(a[l][0]);
      double re_acc = 0.0;
      for (int m = 1; m <= half; ++m) {
        const double wt = (m == half) ? 0.5 : 1.0;
        re_acc +=
            wt * (a[k][static_cast<std::size_t>(m)] *
                  std::conj(a[l][static_cast<std::size_t>(m)]))
                     .real();
      }
      total += du * (f0 + 2.0 * re_acc);
    }
  }
  const double nd = static_cast<double>(n);
  const double scale = 2.0 * kPi * nd * (nd - 1.0);
  if (std::abs(total.imag()) / scale > 1e-9) {
    throw NumericError("pairwise oracle: residual imaginary part exceeds 1e-9");
  }
  return total.real() / scale + internal::null_tail_mass(null_model, grid.u_max) /
                                    (2.0 * kPi);
}

double expected_statistic(const DensityModel& f, const DensityModel& null_model,
                          const KernelSpec& kernel, int grid_count) {
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  const double du = grid.du();
  double acc = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double u = m * du;
    const double kt = phi_kernel(kernel.kind, kernel.h * u);
    const double v = std::norm(f.cf(u) * kt - null_model.cf(u));
    acc += (m == 0 || m == half) ? 0.5 * v : v;
  }
  return acc * du / kPi +
         internal::null_tail_mass(null_model, grid.u_max) / (2.0 * kPi);
}

double l2_distance_sq(const DensityModel& f, const DensityModel& null_model) {
  const double full = internal::half_line_integral(
      [&](double u) { return std::norm(f.cf(u) - null_model.cf(u)); }, 0.0,
      internal::spectral_step(f, null_model), 1e-13, 1e-12, "L2 distance");
  return full / (2.0 * kPi);
}

double calibrate_cstar(const TestSetup& setup, std::size_t n, const TestParams& params,
                       std::size_t replicates, std::uint64_t seed, int jobs) {
  if (replicates < 100) {
    throw std::invalid_argument("calibrate_cstar: at least 100 replicates required");
  }
  if (n < 2) throw std::invalid_argument("calibrate_cstar: n >= 2 required");
  if (!(setup.level > 0.0 && setup.level < 1.0)) {
    throw std::invalid_argument("calibrate_cstar: level must lie in (0, 1)");
  }
  const KernelSpec kernel{setup.kernel, params.h};
  const Rng base(seed);
  std::vector<double> ratios(replicates);
  const auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      Rng rng = base.derive(rep);
      const Sample draw = sample_observed(setup.null_model, setup.noise, n, rng);
      const double t = internal::integral_statistic(draw.values, setup.noise, kernel,
                                                    &setup.null_model, setup.grid_count);
      ratios[rep] = std::abs(t) / (params.t_n * params.t_n);
    }
  };
  const int threads = std::max(1, jobs);
  if (threads == 1 || replicates < 2) {
    worker(0, replicates);
  } else {
    const std::size_t used = std::min<std::size_t>(threads, replicates);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(used);
    const std::size_t chunk = (replicates + used - 1) / used;
    for (std::size_t t = 0; t < used; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(replicates, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          worker(begin, end);
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
  std::sort(ratios.begin(), ratios.end());
  const double q = 1.0 - setup.level / 2.0;
  const double pos = std::ceil(q * static_cast<double>(replicates)) - 1.0;
  const std::size_t idx = static_cast<std::size_t>(
      std::clamp(pos, 0.0, static_cast<double>(replicates - 1)));
  return ratios[idx];
}

bool decide(double statistic, double c_star, double t_n) {
  return std::abs(statistic) > c_star * t_n * t_n;
}

double condition23_constant(const DensityModel& null_model, double window,
                            int grid_points) {
  if (grid_points < 2) {
    throw std::invalid_argument("condition23_constant: at least 2 grid points");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double x = -window + 2.0 * window * i / (grid_points - 1);
    best = std::min(best, null_model.density(x) * (1.0 + x * x));
  }
  return best;
}

TestOutcome run_gof_test(const Sample& sample, const TestSetup& setup,
                         std::size_t calibration_replicates, std::uint64_t seed,
                         int jobs) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("run_gof_test: n >= 2 required");
  const TestParams params =
      select_test_params(setup.cls, setup.noise.descriptor(), static_cast<double>(n));
  const KernelSpec kernel{setup.kernel, params.h};
  TestOutcome out;
  out.statistic =
      test_statistic(sample, setup.null_model, setup.noise, kernel, setup.grid_count);
  out.h = params.h;
  out.t_n = params.t_n;
  out.c_star = calibrate_cstar(setup, n, params, calibration_replicates, seed, jobs);
  out.threshold = out.c_star * params.t_n * params.t_n;
  out.reject = decide(out.statistic, out.c_star, params.t_n);
  out.calibration_replicates = calibration_replicates;
  out.calibration_seed = seed;
  return out;
}

}  // namespace deconv
