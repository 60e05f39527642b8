#include "deconv/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "deconv/errors.hpp"

namespace deconv {

double phi_kernel(KernelKind kind, double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (kind == KernelKind::sinc) return 0.0;
  if (a >= 2.0) return 0.0;
  const double q = a * (2.0 - a);  // in (0,1) on the taper
  return std::exp(1.0 - 1.0 / (q * q));
}

double kernel_support_edge(KernelKind kind) {
  return kind == KernelKind::sinc ? 1.0 : 2.0;
}

complex deconv_weight(double u, const KernelSpec& kernel, const NoiseModel& noise) {
  if (!(kernel.h > 0.0)) throw std::invalid_argument("kernel: h must be > 0");
  const double k = phi_kernel(kernel.kind, kernel.h * u);
  if (k == 0.0) return 0.0;
  const complex g = noise.cf(u);
  if (std::abs(g) < 1e-300)
    throw NumericError("deconv_weight overflow: |Phi^g| underflow at u = " +
                       std::to_string(u));
  return k / g;
}

FrequencyGrid make_grid(const KernelSpec& kernel, int count) {
  if (!(kernel.h > 0.0)) throw std::invalid_argument("kernel: h must be > 0");
  if (count < 256 || count % 2 != 0)
    throw std::invalid_argument("grid: count must be even and >= 256");
  FrequencyGrid grid;
  grid.u_max = kernel_support_edge(kernel.kind) / kernel.h;
  grid.count = count;
  return grid;
}

namespace {

template <typename T>
T trapezoid(const FrequencyGrid& grid, const std::vector<T>& values) {
  if (static_cast<int>(values.size()) != grid.nodes())
    throw std::invalid_argument("integrate: values length must equal grid nodes");
  T acc = 0.5 * (values.front() + values.back());
  for (int j = 1; j < grid.count; ++j) acc += values[j];
  return acc * grid.du();
}

}  // namespace

double integrate(const FrequencyGrid& grid, const std::vector<double>& values) {
  return trapezoid(grid, values);
}

complex integrate(const FrequencyGrid& grid, const std::vector<complex>& values) {
  return trapezoid(grid, values);
}

double kernel_time_domain(const KernelSpec& kernel, const NoiseModel& noise, double x,
                          int count) {
  const FrequencyGrid grid = make_grid(kernel, count);
  std::vector<double> values(grid.nodes());
  for (int j = 0; j < grid.nodes(); ++j) {
    const double u = grid.node(j);
    // Re(e^{-iux} w(u)); the imaginary part cancels by Hermitian symmetry.
    const complex w = deconv_weight(u, kernel, noise);
    values[j] = std::cos(u * x) * w.real() + std::sin(u * x) * w.imag();
  }
  return integrate(grid, values) / (2.0 * std::numbers::pi);
}

}  // namespace deconv
