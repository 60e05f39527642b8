#pragma once

// Shared numerical plumbing for the statistic and distance computations.
// Not part of the public API.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "deconv/models.hpp"
#include "deconv/spectral.hpp"

namespace deconv::internal {

//! Sobolev functional (1/2pi) int |Phi(u)|^2 |u|^{2 beta} du of a laplace_k
//! density with |Phi(u)|^2 = (1 + a u^2)^{-2k}, a = scale^2/k, in closed form:
//! (1/2pi) a^{-(beta+1/2)} B(beta + 1/2, 2k - beta - 1/2). The numeric tail
//! u^{2 beta - 4k} decays too slowly for quadrature when beta is close to
//! 2k - 1/2; infinite at and beyond that boundary.
inline double laplace_sobolev_functional(int k, double scale, double beta) {
  const double a = scale * scale / static_cast<double>(k);
  const double p = beta + 0.5;
  const double q = 2.0 * static_cast<double>(k) - beta - 0.5;
  if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
  const double log_beta_fn = std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
  return std::pow(a, -p) * std::exp(log_beta_fn) / (2.0 * std::numbers::pi);
}

//! S(u_m) = sum_k e^{i u_m y_k} on the half grid u_m = m du, m = 0..half.
//! One complex rotation per node per observation.
std::vector<complex> empirical_cf_halfgrid(const std::vector<double>& data, double du,
                                           int half);

//! Core integral statistic
//!   T = (2 pi n(n-1))^{-1} int (|A|^2 - sum_k |a_k|^2) du,
//!   a_k(u) = e^{iuY_k} w(u) - Phi_0(u), A = w S - n Phi_0,
//! over [-U, U] with U = (kernel edge)/h, plus the exact outside-support tail
//! n(n-1) (1/2pi) int_{|u|>U} |Phi_0|^2 du. null_model == nullptr means
//! Phi_0 == 0 (the quadratic functional estimator).
double integral_statistic(const std::vector<double>& data, const NoiseModel& noise,
                          const KernelSpec& kernel, const DensityModel* null_model,
                          int grid_count);

//! int_{|u|>from} |Phi_0(u)|^2 du (both tails), non-oscillatory quadrature.
double null_tail_mass(const DensityModel& null_model, double from);

//! 2 int_{from}^inf q(u) du for a nonnegative, eventually-decaying even
//! integrand: trapezoid march with step du, stopping once q stays below
//! rel_tol * (1e-300 + abs_floor + accumulated) over a trailing window of
//! max(5, 0.02 u) in u-units; a power-law tail estimate is added at the stop.
//! Raises NumericError naming `operation` when no decay is detected.
double half_line_integral(const std::function<double(double)>& q, double from,
                          double du, double rel_tol, double abs_floor,
                          const char* operation);

//! Step size fine enough to integrate products of the two models' spectra by
//! the aliasing argument: pi / (2 (1 + sum of |mean| + 10 sd)).
double spectral_step(const DensityModel& a);
double spectral_step(const DensityModel& a, const DensityModel& b);

}  // namespace deconv::internal
