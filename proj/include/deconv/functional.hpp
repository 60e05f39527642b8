#pragma once

#include <cstdint>
#include <optional>

#include "deconv/models.hpp"
#include "deconv/spectral.hpp"

namespace deconv {

//! Estimation problem cell: signal smoothness class plus noise decay family.
struct EstimationSetup {
  SmoothnessClass cls;
  SmoothnessDescriptor noise;
};

//! parametric: the quadratic functional is estimable at rate n^{-1/2}.
//! Holds iff (sobolev, polynomial, beta > sigma + 1/4), or (supersmooth,
//! polynomial), or (supersmooth, exponential with r > s or r == s, alpha > gamma).
enum class Regime { parametric, nonparametric };

Regime classify_regime(const EstimationSetup& setup);

//! Bandwidth schedules for estimating d = int f^2, keyed by setup cell:
//!   sobolev/polynomial, parametric:     n^{-(1/(4 sigma+1) + 1/(4 beta))/2}
//!   sobolev/polynomial, nonparametric:  n^{-2/(4 beta + 4 sigma + 1)}
//!   supersmooth/polynomial:             geometric mean of n^{-1/(4 sigma+1)}
//!                                       and (log n/(4 alpha))^{-1/r}
//!   sobolev/exponential:                (log n/(2 gamma)
//!                                        - ((2 beta+1)/(2 gamma s)) log(log n/(2 gamma)))^{-1/s}
//!   supersmooth/exponential:            root of the bandwidth equation below;
//!                                       on the boundary r == s, alpha == gamma,
//!                                       root of h^{r-1} exp(4 alpha/h^r) = n
//! Monotone nonincreasing in n. Throws std::invalid_argument when n is too
//! small for an inner logarithm to be positive.
double select_estimation_bandwidth(const EstimationSetup& setup, double n);

//! Solve 2 alpha/h^r + 2 gamma/h^s = log n - (log log n)^2 by bisection;
//! residual below 1e-10. Requires the right-hand side to be positive.
double solve_eq22(double alpha, double r, double gamma, double s, double n);

//! Error scale phi_n attainable in the cell (first-power error, Table-style):
//! parametric cells give n^{-1/2}; sobolev/polynomial n^{-4 beta/(4 beta+4 sigma+1)};
//! sobolev/exponential L (log n/(2 gamma))^{-2 beta/s}; supersmooth/exponential
//! L exp(-2 alpha/h^r) at the selected h; the r==s, alpha==gamma boundary gives
//! (log n)^{r/2}/sqrt(n).
double rate_phi(const EstimationSetup& setup, double n);

struct EstimateResult {
  double d_n = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  std::optional<Regime> regime;
  std::optional<double> bias_bound;      // L h^{2 beta} or L exp(-2 alpha/h^r)
  std::optional<double> variance_proxy;  // 1/n + (1/2pi) int |w|^4 du / n^2
};

//! Quadratic functional estimate
//!   d_n = (2 pi n (n-1))^{-1} int |w(u)|^2 (|sum_k e^{iuY_k}|^2 - n) du,
//! computed in O(n G + G). Requires n >= 2.
EstimateResult estimate_d(const Sample& sample, const NoiseModel& noise,
                          const KernelSpec& kernel, int grid_count = 4096);

//! Same estimator with the bandwidth chosen from the setup schedules; fills
//! regime and diagnostics.
EstimateResult estimate_d(const Sample& sample, const NoiseModel& noise,
                          const EstimationSetup& setup,
                          KernelKind kind = KernelKind::smoothed_trapezoid,
                          int grid_count = 4096);

//! Literal O(n^2 G) double sum over pairs, the reference implementation.
//! Refuses n above the oracle cap.
double estimate_d_pairwise_oracle(const Sample& sample, const NoiseModel& noise,
                                  const KernelSpec& kernel, int grid_count = 4096,
                                  std::size_t oracle_cap = 200);

//! E_f[d_n] = ||K_h * f||^2 = (1/2pi) int (Phi^K(h u))^2 |Phi_f(u)|^2 du.
//! Always <= int f^2 since Phi^K <= 1. For the sinc kernel the transform is an
//! indicator, so the square is immaterial.
double expected_dn(const DensityModel& f, const KernelSpec& kernel,
                   int grid_count = 8192);

//! int f^2 = (1/2pi) int |Phi_f|^2 du by adaptive-cutoff quadrature.
double density_l2_norm_sq(const DensityModel& f);

//! Whether the F-function integral converges for the class/noise pair:
//! noiseless always; polynomial noise with sobolev beta >= sigma or any
//! supersmooth class; exponential noise only for supersmooth classes with
//! r > s or (r == s and alpha > gamma).
bool f_function_defined(const SmoothnessClass& cls, const NoiseModel& noise);

//! F(y) = (1/2pi) int e^{-iuy} Phi_f(u) / conj(Phi^g(u)) du, real-valued.
//! Requires f's smoothness class when the noise is nontrivial (the class/noise
//! pair gates convergence); truncates where |Phi_f/Phi^g| < 1e-12.
double f_function(const DensityModel& f, const NoiseModel& noise, double y);

//! omega^2 = Var_f F(Y) = int F^2 p - (int f^2)^2 with p = f * g, >= 0.
double omega_sq(const DensityModel& f, const NoiseModel& noise);

//! Variance bookkeeping for the estimator at (n, h):
//!   Var(d_n) ~ quartic_term + 4 omega_sq / n,
//!   quartic_term = (2/n^2) ||p||^2 (1/2pi) int |w(u)|^4 du.
struct VarianceSummary {
  double omega_sq = 0.0;
  double d = 0.0;
  double p_norm_sq = 0.0;
  double quartic_term = 0.0;
  double total = 0.0;
};

VarianceSummary variance_summary(const DensityModel& f, const NoiseModel& noise,
                                 const KernelSpec& kernel, std::size_t n,
                                 int grid_count = 8192);

}  // namespace deconv
