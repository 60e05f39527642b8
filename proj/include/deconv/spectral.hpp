#pragma once

#include <vector>

#include "deconv/models.hpp"

namespace deconv {

//! Spectral cutoff kernels, given by their Fourier transforms in kernel units:
//!   sinc                Phi^K(t) = 1 on |t| <= 1, 0 outside
//!   smoothed_trapezoid  Phi^K(t) = 1 on |t| <= 1,
//!                       exp(1 - (|t|(2 - |t|))^{-2}) on 1 < |t| < 2, 0 beyond
enum class KernelKind { sinc, smoothed_trapezoid };

double phi_kernel(KernelKind kind, double t);

//! Edge of the support of Phi^K: 1 for sinc, 2 for the smoothed trapezoid.
double kernel_support_edge(KernelKind kind);

struct KernelSpec {
  KernelKind kind = KernelKind::smoothed_trapezoid;
  double h = 1.0;  // bandwidth, > 0
};

//! Deconvolution weight w(u) = Phi^K(h u) / Phi^g(u). Zero wherever the kernel
//! transform vanishes, regardless of the noise. Raises NumericError when
//! |Phi^g(u)| underflows below 1e-300 inside the kernel support (bandwidth too
//! small for exponentially smooth noise).
complex deconv_weight(double u, const KernelSpec& kernel, const NoiseModel& noise);

//! Symmetric uniform grid on [-u_max, u_max] with `count` panels.
struct FrequencyGrid {
  double u_max = 1.0;
  int count = 4096;  // even, >= 256

  double du() const { return 2.0 * u_max / count; }
  double node(int j) const { return -u_max + j * du(); }
  int nodes() const { return count + 1; }
};

//! Grid covering the rescaled kernel support exactly: u_max = edge/h.
FrequencyGrid make_grid(const KernelSpec& kernel, int count = 4096);

//! Composite trapezoid rule over the grid; values.size() must be nodes().
double integrate(const FrequencyGrid& grid, const std::vector<double>& values);
complex integrate(const FrequencyGrid& grid, const std::vector<complex>& values);

//! Time-domain deconvolution kernel (1/2pi) int e^{-iux} w(u) du, real by
//! Hermitian symmetry. Used by the O(n^2) oracles only.
double kernel_time_domain(const KernelSpec& kernel, const NoiseModel& noise, double x,
                          int count = 8192);

}  // namespace deconv
