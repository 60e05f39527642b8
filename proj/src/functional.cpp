#include "deconv/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "deconv/errors.hpp"
#include "internal.hpp"

namespace deconv {

namespace {

constexpr double kPi = 3.14159265358979323846;

double reach(const DensityModel& f) {
  return std::abs(f.mean()) + 12.0 * std::sqrt(std::max(f.variance(), 0.0));
}

}  // namespace

namespace internal {

std::vector<complex> empirical_cf_halfgrid(const std::vector<double>& data, double du,
                                           int half) {
  std::vector<complex> s(static_cast<std::size_t>(half) + 1, complex(0.0, 0.0));
  for (double y : data) {
    const complex step = std::polar(1.0, du * y);
    complex c(1.0, 0.0);
    s[0] += c;
    for (int m = 1; m <= half; ++m) {
      c *= step;
      s[static_cast<std::size_t>(m)] += c;
    }
  }
  return s;
}

double integral_statistic(const std::vector<double>& data, const NoiseModel& noise,
                          const KernelSpec& kernel, const DensityModel* null_model,
                          int grid_count) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("integral statistic: n >= 2 required");
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  const double du = grid.du();
  const std::vector<complex> s = empirical_cf_halfgrid(data, du, half);

  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double u = m * du;
    const complex w = deconv_weight(u, kernel, noise);
    double g;
    if (null_model == nullptr) {
      g = std::norm(w) * (std::norm(s[static_cast<std::size_t>(m)]) - nd);
    } else {
      const complex phi0 = null_model->cf(u);
      const complex sm = s[static_cast<std::size_t>(m)];
      const complex a_sum = w * sm - nd * phi0;
      const double diag = nd * std::norm(w) + nd * std::norm(phi0) -
                          2.0 * (w * std::conj(phi0) * sm).real();
      g = std::norm(a_sum) - diag;
    }
    if (!std::isfinite(g)) {
      throw NumericError("integral statistic: non-finite integrand at u = " +
                         std::to_string(u));
    }
    acc += (m == 0 || m == half) ? 0.5 * g : g;
  }
  double integral = 2.0 * acc * du;  // even integrand, both half lines
  if (null_model != nullptr) {
    integral += nd * (nd - 1.0) * null_tail_mass(*null_model, grid.u_max);
  }
  return integral / (2.0 * kPi * nd * (nd - 1.0));
}

double null_tail_mass(const DensityModel& null_model, double from) {
  return half_line_integral(
      [&null_model](double u) { return std::norm(null_model.cf(u)); }, from,
      spectral_step(null_model), 1e-13, 1e-2, "null spectral tail");
}

double half_line_integral(const std::function<double(double)>& q, double from,
                          double du, double rel_tol, double abs_floor,
                          const char* operation) {
  if (!(du > 0.0)) {
    throw std::invalid_argument(std::string(operation) + ": step must be positive");
  }
  const double span_cap = 1.0e6;
  double acc = 0.0;
  double prev = q(from);
  double last_loud = from;
  // Checkpoints over the tail half of the marched span drive the geometric
  // continuation if the cap is reached.
  double acc_q3 = 0.0, acc_q4 = 0.0;
  double u = from;
  while (u - from < span_cap) {
    const double next_u = u + du;
    const double cur = q(next_u);
    if (!std::isfinite(cur)) {
      throw NumericError(std::string(operation) + ": non-finite integrand at u = " +
                         std::to_string(next_u));
    }
    const double piece = 0.5 * (prev + cur) * du;
    acc += piece;
    const double frac = (next_u - from) / span_cap;
    if (frac > 0.5 && frac <= 0.75) acc_q3 += piece;
    if (frac > 0.75) acc_q4 += piece;
    const double threshold = rel_tol * (1e-300 + abs_floor + acc);
    if (cur >= threshold) last_loud = next_u;
    if (next_u - last_loud >= std::max(5.0, 0.02 * next_u)) {
      return 2.0 * acc;  // decayed below tolerance over a sustained window
    }
    prev = cur;
    u = next_u;
  }
  // Cap reached: continue geometrically if the quarter-span increments decay.
  if (acc_q3 > 0.0 && acc_q4 < 0.95 * acc_q3) {
    const double ratio = acc_q4 / acc_q3;
    return 2.0 * (acc + acc_q4 * ratio / (1.0 - ratio));
  }
  throw NumericError(std::string(operation) + ": spectral integral did not converge");
}

double spectral_step(const DensityModel& a) {
  return kPi / (2.0 * (1.0 + reach(a)));
}

double spectral_step(const DensityModel& a, const DensityModel& b) {
  return kPi / (2.0 * (1.0 + reach(a) + reach(b)));
}

}  // namespace internal

Regime classify_regime(const EstimationSetup& setup) {
  const SmoothnessClass& cls = setup.cls;
  const SmoothnessDescriptor& nz = setup.noise;
  if (cls.tag == SmoothnessClass::Tag::sobolev) {
    if (nz.tag == SmoothnessDescriptor::Tag::polynomial) {
      return cls.beta > nz.sigma + 0.25 ? Regime::parametric : Regime::nonparametric;
    }
    return Regime::nonparametric;
  }
  if (nz.tag == SmoothnessDescriptor::Tag::polynomial) return Regime::parametric;
  if (cls.r > nz.s || (cls.r == nz.s && cls.alpha > nz.gamma)) {
    return Regime::parametric;
  }
  return Regime::nonparametric;
}

namespace {

//! Root of h^{r-1} exp(4 alpha/h^r) = n, the smallest positive solution.
double boundary_bandwidth(double alpha, double r, double n) {
  const double ln_n = std::log(n);
  const auto residual = [&](double h) {
    return (r - 1.0) * std::log(h) + 4.0 * alpha / std::pow(h, r) - ln_n;
  };
  double lo = 1e-8;
  if (!(residual(lo) > 0.0)) {
    throw NumericError("bandwidth boundary equation: no bracket at small h");
  }
  double hi = std::pow(4.0 * alpha / std::max(ln_n, 1e-3), 1.0 / r);
  hi = std::max(hi, 2e-8);
  int guard = 0;
  while (residual(hi) > 0.0) {
    hi *= 1.3;
    if (++guard > 200 || hi > 1e3) {
      throw NumericError("bandwidth boundary equation has no root for this n");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

double select_estimation_bandwidth(const EstimationSetup& setup, double n) {
  if (!(n >= 2.0)) {
    throw std::invalid_argument("select_estimation_bandwidth: n >= 2 required");
  }
  const SmoothnessClass& cls = setup.cls;
  const SmoothnessDescriptor& nz = setup.noise;
  const double ln_n = std::log(n);
  const bool sobolev = cls.tag == SmoothnessClass::Tag::sobolev;
  const bool polynomial = nz.tag == SmoothnessDescriptor::Tag::polynomial;

  if (sobolev && polynomial) {
    if (classify_regime(setup) == Regime::parametric) {
      const double e = 0.5 * (1.0 / (4.0 * nz.sigma + 1.0) + 1.0 / (4.0 * cls.beta));
      return std::pow(n, -e);
    }
    return std::pow(n, -2.0 / (4.0 * cls.beta + 4.0 * nz.sigma + 1.0));
  }
  if (!sobolev && polynomial) {
    const double h_lo = std::pow(n, -1.0 / (4.0 * nz.sigma + 1.0));
    const double h_hi = std::pow(ln_n / (4.0 * cls.alpha), -1.0 / cls.r);
    return std::sqrt(h_lo * h_hi);
  }
  if (sobolev) {  // exponential noise
    const double base = ln_n / (2.0 * nz.gamma);
    const double inner =
        base - ((2.0 * cls.beta + 1.0) / (2.0 * nz.gamma * nz.s)) * std::log(base);
    if (!(base > 0.0) || !(inner > 0.0)) {
      throw std::invalid_argument(
          "select_estimation_bandwidth: n too small for the exponential-noise "
          "schedule (inner logarithm nonpositive)");
    }
    return std::pow(inner, -1.0 / nz.s);
  }
  // supersmooth class, exponential noise
  if (cls.r == nz.s && cls.alpha == nz.gamma) {
    return boundary_bandwidth(cls.alpha, cls.r, n);
  }
  if (classify_regime(setup) == Regime::parametric) {
    const double h_lo = std::pow(ln_n / (4.0 * nz.gamma), -1.0 / nz.s);
    const double h_hi = std::pow(ln_n / (4.0 * cls.alpha), -1.0 / cls.r);
    return std::sqrt(h_lo * h_hi);
  }
  return solve_eq22(cls.alpha, cls.r, nz.gamma, nz.s, n);
}

double solve_eq22(double alpha, double r, double gamma, double s, double n) {
  if (!(alpha > 0.0) || !(r > 0.0) || !(gamma > 0.0) || !(s > 0.0)) {
    throw std::invalid_argument("solve_eq22: parameters must be positive");
  }
  if (!(n > 1.0)) throw std::invalid_argument("solve_eq22: n > 1 required");
  const double ln_n = std::log(n);
  const double lll = std::log(ln_n);
  const double rhs = ln_n - lll * lll;
  if (!(rhs > 0.0)) {
    throw std::invalid_argument(
        "solve_eq22: right-hand side log n - (log log n)^2 must be positive");
  }
  const auto residual = [&](double h) {
    return 2.0 * alpha / std::pow(h, r) + 2.0 * gamma / std::pow(h, s) - rhs;
  };
  double lo = 1e-8, hi = 1e8;
  for (int i = 0; i < 220; ++i) {
    const double mid = std::sqrt(lo * hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double rate_phi(const EstimationSetup& setup, double n) {
  const SmoothnessClass& cls = setup.cls;
  const SmoothnessDescriptor& nz = setup.noise;
  const double ln_n = std::log(n);
  const bool boundary = cls.tag == SmoothnessClass::Tag::supersmooth &&
                        nz.tag == SmoothnessDescriptor::Tag::exponential &&
                        cls.r == nz.s && cls.alpha == nz.gamma;
  if (boundary) {
    return std::pow(ln_n, cls.r / 2.0) / std::sqrt(n);
  }
  if (classify_regime(setup) == Regime::parametric) {
    return 1.0 / std::sqrt(n);
  }
  if (cls.tag == SmoothnessClass::Tag::sobolev) {
    if (nz.tag == SmoothnessDescriptor::Tag::polynomial) {
      return std::pow(n, -4.0 * cls.beta / (4.0 * cls.beta + 4.0 * nz.sigma + 1.0));
    }
    return cls.radius * std::pow(ln_n / (2.0 * nz.gamma), -2.0 * cls.beta / nz.s);
  }
  const double h = solve_eq22(cls.alpha, cls.r, nz.gamma, nz.s, n);
  return cls.radius * std::exp(-2.0 * cls.alpha / std::pow(h, cls.r));
}

EstimateResult estimate_d(const Sample& sample, const NoiseModel& noise,
                          const KernelSpec& kernel, int grid_count) {
  EstimateResult out;
  out.d_n =
      internal::integral_statistic(sample.values, noise, kernel, nullptr, grid_count);
  out.h = kernel.h;
  out.n = sample.size();
  return out;
}

EstimateResult estimate_d(const Sample& sample, const NoiseModel& noise,
                          const EstimationSetup& setup, KernelKind kind,
                          int grid_count) {
  const double n = static_cast<double>(sample.size());
  const KernelSpec kernel{kind, select_estimation_bandwidth(setup, n)};
  EstimateResult out = estimate_d(sample, noise, kernel, grid_count);
  out.regime = classify_regime(setup);
  const SmoothnessClass& cls = setup.cls;
  out.bias_bound = cls.tag == SmoothnessClass::Tag::sobolev
                       ? cls.radius * std::pow(kernel.h, 2.0 * cls.beta)
                       : cls.radius *
                             std::exp(-2.0 * cls.alpha / std::pow(kernel.h, cls.r));
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  double quartic = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double v = std::norm(deconv_weight(m * grid.du(), kernel, noise));
    const double term = v * v;
    quartic += (m == 0 || m == half) ? 0.5 * term : term;
  }
  const double quartic_mass = quartic * grid.du() / kPi;  // (1/2pi) int |w|^4 du
  out.variance_proxy = 1.0 / n + quartic_mass / (n * n);
  return out;
}

double estimate_d_pairwise_oracle(const Sample& sample, const NoiseModel& noise,
                                  const KernelSpec& kernel, int grid_count,
                                  std::size_t oracle_cap) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("pairwise oracle: n >= 2 required");
  if (n > oracle_cap) {
    throw std::invalid_argument("pairwise oracle: n exceeds the oracle cap of " +
                                std::to_string(oracle_cap));
  }
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  const double du = grid.du();
  std::vector<double> wsq(static_cast<std::size_t>(half) + 1);
  for (int m = 0; m <= half; ++m) {
    wsq[static_cast<std::size_t>(m)] = std::norm(deconv_weight(m * du, kernel, noise));
  }
  complex total(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (k == l) continue;
      const double x = sample.values[k] - sample.values[l];
      // int_{-U}^{U} |w|^2 e^{iux} du on the same trapezoid nodes: the even
      // symmetry of |w|^2 folds the integral onto the positive half grid.
      const complex step = std::polar(1.0, du * x);
      complex c(1.0, 0.0);
      complex acc = 0.5 * wsq[0] * c;
      for (int m = 1; m <= half; ++m) {
        c *= step;
        const double weight = (m == half) ? 0.5 : 1.0;
        acc += weight * wsq[static_cast<std::size_t>(m)] * c;
      }
      // The imaginary parts of the (k,l) and (l,k) terms cancel; keep them so
      // the residual can be asserted below.
      total += 2.0 * du * acc;
    }
  }
  const double nd = static_cast<double>(n);
  const double scale = 2.0 * kPi * nd * (nd - 1.0);
  if (std::abs(total.imag()) / scale > 1e-9) {
    throw NumericError("pairwise oracle: residual imaginary part exceeds 1e-9");
  }
  return total.real() / scale;
}

double expected_dn(const DensityModel& f, const KernelSpec& kernel, int grid_count) {
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  const double du = grid.du();
  double acc = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double u = m * du;
    const double kt = phi_kernel(kernel.kind, kernel.h * u);
    const double v = kt * kt * std::norm(f.cf(u));
    acc += (m == 0 || m == half) ? 0.5 * v : v;
  }
  return acc * du / kPi;
}

double density_l2_norm_sq(const DensityModel& f) {
  const double full = internal::half_line_integral(
      [&f](double u) { return std::norm(f.cf(u)); }, 0.0, internal::spectral_step(f),
      1e-13, 0.0, "density L2 norm");
  return full / (2.0 * kPi);
}

bool f_function_defined(const SmoothnessClass& cls, const NoiseModel& noise) {
  if (noise.kind == "none") return true;
  const SmoothnessDescriptor d = noise.descriptor();
  if (d.tag == SmoothnessDescriptor::Tag::polynomial) {
    return cls.tag == SmoothnessClass::Tag::supersmooth || cls.beta >= d.sigma;
  }
  if (cls.tag != SmoothnessClass::Tag::supersmooth) return false;
  return cls.r > d.s || (cls.r == d.s && cls.alpha > d.gamma);
}

namespace {

void require_f_function(const DensityModel& f, const NoiseModel& noise) {
  if (noise.kind == "none") return;
  if (!f.smoothness()) {
    throw std::invalid_argument(
        "f_function: signal smoothness class required with nontrivial noise");
  }
  if (!f_function_defined(*f.smoothness(), noise)) {
    throw std::invalid_argument(
        "f_function: unsupported regime, the class is rougher than the noise and F "
        "may not exist");
  }
}

//! March until |ratio| and |product| spectra stay below 1e-12 over a window.
double f_truncation_u(const DensityModel& f, const NoiseModel& noise, double du) {
  double u = 0.0;
  double last_loud = 0.0;
  const double limit = 1e7;
  while (u < limit) {
    u += du;
    const double num = std::abs(f.cf(u));
    const double den = std::abs(noise.cf(u));
    if (den < 1e-300) {
      throw NumericError("f_function: noise cf underflow at u = " + std::to_string(u));
    }
    if (num / den >= 1e-12) last_loud = u;
    if (u - last_loud >= std::max(5.0, 0.02 * u)) return u;
  }
  throw NumericError("f_function: integrand does not fall below the cutoff");
}

}  // namespace

double f_function(const DensityModel& f, const NoiseModel& noise, double y) {
  if (noise.kind == "none") return f.density(y);
  require_f_function(f, noise);
  const double du = kPi / (2.0 * (1.0 + reach(f) + std::abs(y)));
  const double u_max = f_truncation_u(f, noise, du);
  const int count = static_cast<int>(std::ceil(u_max / du));
  // F(y) = (1/pi) int_0^{U} Re(e^{-iuy} Phi_f(u)/conj(Phi^g(u))) du, Hermitian q.
  const complex step = std::polar(1.0, -du * y);
  complex rot(1.0, 0.0);
  double acc = 0.5 * (f.cf(0.0) / std::conj(noise.cf(0.0))).real();
  for (int m = 1; m <= count; ++m) {
    rot *= step;
    const double u = m * du;
    const complex q = f.cf(u) / std::conj(noise.cf(u));
    const double term = (rot * q).real();
    acc += (m == count) ? 0.5 * term : term;
  }
  return acc * du / kPi;
}

double omega_sq(const DensityModel& f, const NoiseModel& noise) {
  const double d = density_l2_norm_sq(f);
  const double mu = f.mean() + (noise.kind == "none" ? 0.0 : noise.loc);
  const double var =
      f.variance() + (noise.kind == "none" ? 0.0 : noise.variance());
  const double sd = std::sqrt(std::max(var, 1e-12));
  const double y_lo = mu - 12.0 * sd, y_hi = mu + 12.0 * sd;
  const int ny = 6000;  // panels
  const double dy = (y_hi - y_lo) / ny;

  double acc = 0.0;
  if (noise.kind == "none") {
    for (int i = 0; i <= ny; ++i) {
      const double y = y_lo + i * dy;
      const double fy = f.density(y);
      const double term = fy * fy * fy;  // F = f, p = f
      acc += (i == 0 || i == ny) ? 0.5 * term : term;
    }
    acc *= dy;
  } else {
    require_f_function(f, noise);
    const double du = kPi / (2.0 * (1.0 + reach(f) + std::abs(y_lo) + std::abs(y_hi)));
    const double u_max = f_truncation_u(f, noise, du);
    const int count = static_cast<int>(std::ceil(u_max / du));
    std::vector<complex> q_ratio(static_cast<std::size_t>(count) + 1);
    std::vector<complex> q_prod(static_cast<std::size_t>(count) + 1);
    for (int m = 0; m <= count; ++m) {
      const double u = m * du;
      const complex pf = f.cf(u);
      const complex pg = noise.cf(u);
      q_ratio[static_cast<std::size_t>(m)] = pf / std::conj(pg);
      q_prod[static_cast<std::size_t>(m)] = pf * pg;
    }
    for (int i = 0; i <= ny; ++i) {
      const double y = y_lo + i * dy;
      const complex step = std::polar(1.0, -du * y);
      complex rot(1.0, 0.0);
      double accF = 0.5 * q_ratio[0].real();
      double accP = 0.5 * q_prod[0].real();
      for (int m = 1; m <= count; ++m) {
        rot *= step;
        const double wt = (m == count) ? 0.5 : 1.0;
        accF += wt * (rot * q_ratio[static_cast<std::size_t>(m)]).real();
        accP += wt * (rot * q_prod[static_cast<std::size_t>(m)]).real();
      }
      const double F = accF * du / kPi;
      const double p = accP * du / kPi;
      const double term = F * F * p;
      acc += (i == 0 || i == ny) ? 0.5 * term : term;
    }
    acc *= dy;
  }
  const double raw = acc - d * d;
  if (raw < -1e-10) {
    throw NumericError("omega_sq: variance quadrature came out negative");
  }
  return std::max(raw, 0.0);
}

VarianceSummary variance_summary(const DensityModel& f, const NoiseModel& noise,
                                 const KernelSpec& kernel, std::size_t n,
                                 int grid_count) {
  VarianceSummary out;
  out.omega_sq = omega_sq(f, noise);
  out.d = density_l2_norm_sq(f);
  out.p_norm_sq =
      noise.kind == "none"
          ? out.d
          : internal::half_line_integral(
                [&](double u) { return std::norm(f.cf(u) * noise.cf(u)); }, 0.0,
                internal::spectral_step(f), 1e-13, 0.0, "observation L2 norm") /
                (2.0 * kPi);
  const FrequencyGrid grid = make_grid(kernel, grid_count);
  const int half = grid.count / 2;
  double quartic = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double v = std::norm(deconv_weight(m * grid.du(), kernel, noise));
    const double term = v * v;
    quartic += (m == 0 || m == half) ? 0.5 * term : term;
  }
  const double quartic_mass = quartic * grid.du() / kPi;
  const double nd = static_cast<double>(n);
  out.quartic_term = 2.0 * out.p_norm_sq * quartic_mass / (nd * nd);
  out.total = out.quartic_term + 4.0 * out.omega_sq / nd;
  return out;
}

}  // namespace deconv
