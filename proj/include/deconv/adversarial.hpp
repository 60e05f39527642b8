#pragma once

#include <cstdint>
#include <vector>

#include "deconv/models.hpp"

namespace deconv {

//! Smooth bump pair supported on [-1, 0]:
//!   G(x) = b(4x + 3) - b(4x + 1),  b(t) = exp(-1/(1 - t^2)) on |t| < 1.
//! Infinitely differentiable, integrates to exactly 0, vanishes with all
//! derivatives at -1, -1/2 and 0.
double g_bump(double x);

//! m-th derivative of G, exact via the polynomial recurrence
//! b^{(m)}(t) = b(t) P_m(t)/(1-t^2)^{2m}, P_{m+1} = P_m'(1-t^2)^2
//! + (4mt(1-t^2) - 2t) P_m, evaluated in log space for edge safety.
double g_bump_derivative(int m, double x);

//! Spectrum Phi^G(v) = int e^{ivx} G(x) dx. Backed by a one-time FFT table
//! with cubic interpolation; |Phi^G| decays like exp(-a sqrt(|v|)).
complex phi_g_bump(double v);
std::vector<complex> phi_g_bump(const std::vector<double>& grid);

//! Number of perturbation slots at bump width h: M = floor(1/h) - 1, so all
//! bumps fit inside [0, 1]. Throws std::invalid_argument when M < 1.
std::size_t perturbation_count(double h);

//! i.i.d. uniform signs in {-1, +1}; deterministic given seed.
std::vector<int> sample_theta(std::size_t count, std::uint64_t seed);

//! The deconvolved bump H: the function with H * g_h = G at bump scale, i.e.
//! Phi^H(v) = Phi^G(v)/Phi^g(v/h). For laplace_k noise with loc 0 this is the
//! exact finite sum H = sum_{j=0}^k C(k,j) (-1)^j c^{2j} G^{(2j)},
//! c = scale/(sqrt(k) h); supported on [-1, 0], integrates to 0. Other noise
//! kinds are rejected (the quotient is not integrable for gaussian noise).
double deconvolved_bump(const NoiseModel& noise, double h, double z);

//! Perturbed density of the lower-bound construction:
//!   f_theta = f_0 + h^{beta+sigma+1} sum_{j=1}^M theta_j H_h(x - x_j),
//! x_j = j h, H_h = H(./h)/h, with the H above. theta entries in {-1, 0, +1};
//! an empty theta means all zeros (f_theta = f_0 exactly). Construction
//! verifies nonnegativity on the perturbation window (error names the
//! offending x) and the model samples by rejection against f_0.
DensityModel perturbed_density(const DensityModel& f0, const NoiseModel& noise,
                               double beta, double sigma, double h,
                               const std::vector<int>& theta);

//! Exact ||f_theta - f_0||^2 = (#nonzero theta) h^{2(beta+sigma+1)} ||H||^2/h
//! (bump supports are disjoint).
double perturbation_l2_distance_sq(const NoiseModel& noise, double beta, double sigma,
                                   double h, const std::vector<int>& theta);

}  // namespace deconv
