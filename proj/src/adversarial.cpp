#include "deconv/adversarial.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "deconv/errors.hpp"
#include "deconv/rng.hpp"

namespace deconv {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump_window(double t) {
  const double q = 1.0 - t * t;
  if (!(q > 0.0)) return 0.0;
  return std::exp(-1.0 / q);
}

//! Coefficient vectors of P_m in b^{(m)} = b P_m/(1-t^2)^{2m};
//! P_{m+1} = P_m'(1-t^2)^2 + (4mt(1-t^2) - 2t) P_m.
std::vector<std::vector<double>> build_polys(int m_max) {
  std::vector<std::vector<double>> polys;
  polys.push_back({1.0});
  for (int m = 0; m < m_max; ++m) {
    const std::vector<double>& p = polys.back();
    std::vector<double> next(p.size() + 3, 0.0);
    // P_m' * (1 - 2 t^2 + t^4)
    for (std::size_t i = 1; i < p.size(); ++i) {
      const double dp = p[i] * static_cast<double>(i);  // coefficient of t^{i-1}
      next[i - 1] += dp;
      next[i + 1] -= 2.0 * dp;
      next[i + 3] += dp;
    }
    // ((4m - 2) t - 4m t^3) * P_m
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 1] += (4.0 * m - 2.0) * p[i];
      next[i + 3] -= 4.0 * m * p[i];
    }
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    polys.push_back(std::move(next));
  }
  return polys;
}

double horner(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
  return acc;
}

//! b^{(m)}(t) = b(t) P_m(t)/(1-t^2)^{2m}, assembled in log space so the
//! vanishing exponential always wins over the singular denominator.
double bump_deriv(const std::vector<std::vector<double>>& polys, int m, double t) {
  const double q = 1.0 - t * t;
  if (!(q > 0.0)) return 0.0;
  const double p = horner(polys[static_cast<std::size_t>(m)], t);
  if (p == 0.0) return 0.0;
  const double log_mag = -1.0 / q + std::log(std::abs(p)) - 2.0 * m * std::log(q);
  if (log_mag < -740.0) return 0.0;
  return (p > 0.0 ? 1.0 : -1.0) * std::exp(log_mag);
}

struct BumpTable {
  double dv = 0.0;
  double v_max = 0.0;
  std::vector<complex> values;  // Phi^G(m dv), m = 0..values.size()-1
};

const BumpTable& bump_table() {
  static BumpTable table;
  static std::once_flag flag;
  std::call_once(flag, [] {
    const int samples = 2048;              // panels across [-1, 0]
    const double dz = 1.0 / samples;
    const std::size_t padded = std::size_t{1} << 21;
    double* in = fftw_alloc_real(padded);
    fftw_complex* out = fftw_alloc_complex(padded / 2 + 1);
    if (in == nullptr || out == nullptr) {
      throw NumericError("bump spectrum table: allocation failed");
    }
    std::fill(in, in + padded, 0.0);
    for (int j = 0; j <= samples; ++j) in[j] = g_bump(-1.0 + j * dz);
    fftw_plan plan =
        fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, out, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    // Phi^G(v_m) = dz e^{-i v_m} conj(out[m]), v_m = 2 pi m/(padded dz); the
    // plain Riemann sum is superalgebraically accurate because G vanishes with
    // all derivatives at both ends.
    table.dv = 2.0 * kPi / (static_cast<double>(padded) * dz);
    const std::size_t keep = padded / 2 + 1;
    table.values.resize(keep);
    for (std::size_t m = 0; m < keep; ++m) {
      const double v = table.dv * static_cast<double>(m);
      const complex spectral(out[m][0], -out[m][1]);
      table.values[m] = dz * std::polar(1.0, -v) * spectral;
    }
    table.v_max = table.dv * static_cast<double>(keep - 1);
    fftw_free(in);
    fftw_free(out);
  });
  return table;
}

complex phi_g_bump_direct(double v) {
  const int count = 16384;
  const double dz = 1.0 / count;
  complex acc(0.0, 0.0);
  for (int j = 0; j <= count; ++j) {
    const double x = -1.0 + j * dz;
    const double wt = (j == 0 || j == count) ? 0.5 : 1.0;
    acc += wt * g_bump(x) * std::polar(1.0, v * x);
  }
  return acc * dz;
}

int binomial_table(int k, std::vector<double>& coeffs) {
  coeffs.assign(static_cast<std::size_t>(k) + 1, 1.0);
  for (int j = 1; j <= k; ++j) {
    coeffs[static_cast<std::size_t>(j)] =
        coeffs[static_cast<std::size_t>(j - 1)] * (k - j + 1) / j;
  }
  return k;
}

void require_bump_noise(const NoiseModel& noise) {
  if (noise.kind == "none") return;
  if (noise.kind != "laplace_k" || noise.loc != 0.0) {
    throw std::invalid_argument(
        "deconvolved bump: only laplace_k noise with loc 0 admits the exact "
        "finite-sum deconvolution");
  }
}

//! Evaluator for H = sum_j C(k,j) (-1)^j c^{2j} G^{(2j)} with private copies of
//! the derivative polynomials, safe for concurrent use.
class BumpEvaluator {
 public:
  BumpEvaluator(const NoiseModel& noise, double h) {
    require_bump_noise(noise);
    if (!(h > 0.0)) throw std::invalid_argument("deconvolved bump: h must be > 0");
    if (noise.kind == "none") {
      k_ = 0;
      coeffs_ = {1.0};
      polys_ = build_polys(0);
      return;
    }
    k_ = noise.k;
    const double c = noise.scale / (std::sqrt(static_cast<double>(k_)) * h);
    std::vector<double> binom;
    binomial_table(k_, binom);
    coeffs_.resize(static_cast<std::size_t>(k_) + 1);
    for (int j = 0; j <= k_; ++j) {
      coeffs_[static_cast<std::size_t>(j)] =
          binom[static_cast<std::size_t>(j)] * ((j % 2 == 0) ? 1.0 : -1.0) *
          std::pow(c * c, j);
    }
    polys_ = build_polys(2 * k_);
    c_ = c;
  }

  double operator()(double z) const {
    if (z <= -1.0 || z >= 0.0) return 0.0;
    const double t_hi = 4.0 * z + 3.0;
    const double t_lo = 4.0 * z + 1.0;
    double acc = 0.0;
    for (int j = 0; j <= k_; ++j) {
      const int m = 2 * j;
      const double scale = coeffs_[static_cast<std::size_t>(j)] * std::pow(4.0, m);
      acc += scale * (bump_deriv(polys_, m, t_hi) - bump_deriv(polys_, m, t_lo));
    }
    return acc;
  }

  //! Phi^H(v) = Phi^G(v) (1 + (c v)^2)^k.
  complex spectrum(double v) const {
    const double lift = (k_ == 0) ? 1.0 : std::pow(1.0 + c_ * c_ * v * v, k_);
    return phi_g_bump(v) * lift;
  }

  double l2_norm_sq() const {
    const int count = 8192;
    const double dz = 1.0 / count;
    double acc = 0.0;
    for (int j = 0; j <= count; ++j) {
      const double val = (*this)(-1.0 + j * dz);
      acc += (j == 0 || j == count) ? 0.5 * val * val : val * val;
    }
    return acc * dz;
  }

 private:
  int k_ = 0;
  double c_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<std::vector<double>> polys_;
};

}  // namespace

double g_bump(double x) {
  return bump_window(4.0 * x + 3.0) - bump_window(4.0 * x + 1.0);
}

double g_bump_derivative(int m, double x) {
  if (m < 0) throw std::invalid_argument("g_bump_derivative: order must be >= 0");
  const std::vector<std::vector<double>> polys = build_polys(m);
  const double scale = std::pow(4.0, m);
  return scale * (bump_deriv(polys, m, 4.0 * x + 3.0) -
                  bump_deriv(polys, m, 4.0 * x + 1.0));
}

complex phi_g_bump(double v) {
  const double mag = std::abs(v);
  const BumpTable& table = bump_table();
  if (mag > table.v_max - 2.0 * table.dv) {
    const complex direct = phi_g_bump_direct(mag);
    return v < 0.0 ? std::conj(direct) : direct;
  }
  // 4-point cubic Lagrange interpolation on the uniform table.
  const double pos = mag / table.dv;
  std::size_t base = static_cast<std::size_t>(pos);
  if (base > 0) --base;
  base = std::min(base, table.values.size() - 4);
  const double s = pos - static_cast<double>(base);
  complex acc(0.0, 0.0);
  for (int i = 0; i < 4; ++i) {
    double weight = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      weight *= (s - j) / static_cast<double>(i - j);
    }
    acc += weight * table.values[base + static_cast<std::size_t>(i)];
  }
  return v < 0.0 ? std::conj(acc) : acc;
}

std::vector<complex> phi_g_bump(const std::vector<double>& grid) {
  std::vector<complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = phi_g_bump(grid[i]);
  return out;
}

std::size_t perturbation_count(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("perturbation_count: h must be > 0");
  // one-ulp forgiveness so reciprocals of representable h land on the integer
  const double slots = std::floor(1.0 / h + 1e-12) - 1.0;
  if (slots < 1.0) {
    throw std::invalid_argument(
        "perturbation_count: h too large, no perturbation slot fits in [0, 1]");
  }
  return static_cast<std::size_t>(slots);
}

std::vector<int> sample_theta(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = rng.rademacher();
  return out;
}

double deconvolved_bump(const NoiseModel& noise, double h, double z) {
  const BumpEvaluator eval(noise, h);
  return eval(z);
}

namespace {

class PerturbedImpl final : public detail::DensityImpl {
 public:
  PerturbedImpl(const DensityModel& f0, const NoiseModel& noise, double beta,
                double sigma, double h, const std::vector<int>& theta)
      : f0_(f0), bump_(noise, h), h_(h), amp_(std::pow(h, beta + sigma + 1.0)) {
    if (!(beta > 0.0) || !(sigma >= 0.0)) {
      throw std::invalid_argument(
          "perturbed density: beta must be > 0 and sigma >= 0");
    }
    const std::size_t slots = perturbation_count(h);
    if (!theta.empty() && theta.size() != slots) {
      throw std::invalid_argument(
          "perturbed density: theta length must be 0 or perturbation_count(h) = " +
          std::to_string(slots));
    }
    theta_ = theta;
    for (int t : theta_) {
      if (t != -1 && t != 0 && t != 1) {
        throw std::invalid_argument("perturbed density: theta entries must be -1, 0, or 1");
      }
    }
    scan_and_moments();
  }

  complex cf(double u) const override {
    complex shifts(0.0, 0.0);
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      if (theta_[j] == 0) continue;
      const double xj = static_cast<double>(j + 1) * h_;
      shifts += static_cast<double>(theta_[j]) * std::polar(1.0, u * xj);
    }
    if (shifts == complex(0.0, 0.0)) return f0_.cf(u);
    return f0_.cf(u) + amp_ * bump_.spectrum(h_ * u) * shifts;
  }

  double density(double x) const override {
    double out = f0_.density(x);
    if (theta_.empty()) return out;
    // x lies in slot j when x in ((j-1)h, jh]; the bump vanishes at the edges.
    const double pos = x / h_;
    const double j = std::ceil(pos);
    if (j >= 1.0 && j <= static_cast<double>(theta_.size())) {
      const int t = theta_[static_cast<std::size_t>(j) - 1];
      if (t != 0) out += amp_ * static_cast<double>(t) * bump_((x - j * h_) / h_) / h_;
    }
    return out;
  }

  double sample(Rng& rng) const override {
    if (theta_.empty()) return f0_.sample(rng);
    std::size_t attempts = 0, accepted = 0;
    while (attempts < 1000000) {
      ++attempts;
      const double x = f0_.sample(rng);
      const double base = f0_.density(x);
      if (!(base > 0.0)) continue;
      const double target = density(x);
      if (rng.uniform01() * envelope_ * base <= target) {
        ++accepted;
        return x;
      }
      if (attempts >= 10000 &&
          static_cast<double>(accepted + 1) < 1e-3 * static_cast<double>(attempts)) {
        throw NumericError("perturbed density sampling: acceptance rate below 1e-3");
      }
    }
    throw NumericError("perturbed density sampling: attempt limit exhausted");
  }

  double mean() const override { return mean_; }
  double variance() const override { return variance_; }
  std::string kind() const override { return "perturbed"; }
  ModelInfo info() const override {
    throw std::invalid_argument(
        "perturbed densities are built programmatically and have no serializable "
        "parameter set");
  }

 private:
  void scan_and_moments() {
    // Nonnegativity scan over active slots plus the envelope for rejection
    // sampling; moment corrections from the bump's own moments.
    double ratio_max = 1.0;
    const int per_slot = 1024;
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      if (theta_[j] == 0) continue;
      const double left = static_cast<double>(j) * h_;
      for (int i = 0; i <= per_slot; ++i) {
        const double x = left + h_ * static_cast<double>(i) / per_slot;
        const double value = density(x);
        if (value < 0.0) {
          throw NumericError("perturbed density is negative at x = " +
                             std::to_string(x) +
                             "; lower the bump scale h or the class exponents");
        }
        const double base = f0_.density(x);
        if (base > 0.0) ratio_max = std::max(ratio_max, value / base);
      }
    }
    envelope_ = 1.05 * ratio_max;

    const int count = 8192;
    const double dz = 1.0 / count;
    double mu = 0.0, s2 = 0.0;
    for (int i = 0; i <= count; ++i) {
      const double z = -1.0 + i * dz;
      const double wt = (i == 0 || i == count) ? 0.5 : 1.0;
      const double val = bump_(z);
      mu += wt * z * val;
      s2 += wt * z * z * val;
    }
    mu *= dz;
    s2 *= dz;
    double sum_theta = 0.0, sum_theta_x = 0.0;
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      sum_theta += static_cast<double>(theta_[j]);
      sum_theta_x += static_cast<double>(theta_[j]) * static_cast<double>(j + 1) * h_;
    }
    mean_ = f0_.mean() + amp_ * h_ * mu * sum_theta;
    const double m2_base = f0_.variance() + f0_.mean() * f0_.mean();
    const double m2 = m2_base + amp_ * (2.0 * h_ * mu * sum_theta_x +
                                        h_ * h_ * s2 * sum_theta);
    variance_ = m2 - mean_ * mean_;
  }

  DensityModel f0_;
  BumpEvaluator bump_;
  double h_;
  double amp_;
  std::vector<int> theta_;
  double envelope_ = 1.05;
  double mean_ = 0.0;
  double variance_ = 1.0;
};

}  // namespace

DensityModel perturbed_density(const DensityModel& f0, const NoiseModel& noise,
                               double beta, double sigma, double h,
                               const std::vector<int>& theta) {
  return DensityModel(
      std::make_shared<const PerturbedImpl>(f0, noise, beta, sigma, h, theta));
}

double perturbation_l2_distance_sq(const NoiseModel& noise, double beta, double sigma,
                                   double h, const std::vector<int>& theta) {
  const BumpEvaluator eval(noise, h);
  std::size_t active = 0;
  for (int t : theta) {
    if (t != 0) ++active;
  }
  const double amp = std::pow(h, beta + sigma + 1.0);
  return static_cast<double>(active) * amp * amp * eval.l2_norm_sq() / h;
}

}  // namespace deconv
