#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deconv/rng.hpp"

namespace deconv {

using complex = std::complex<double>;

//! Smoothness class of a signal density, defined through its spectrum:
//!   sobolev     (1/2pi) int |Phi(u)|^2 |u|^{2 beta} du        <= radius
//!   supersmooth (1/2pi) int |Phi(u)|^2 exp(2 alpha |u|^r) du  <= radius
struct SmoothnessClass {
  enum class Tag { sobolev, supersmooth };

  Tag tag = Tag::sobolev;
  double beta = 1.0;    // sobolev order, > 0
  double alpha = 1.0;   // supersmooth exponent, > 0
  double r = 1.0;       // supersmooth power, > 0
  double radius = 1.0;  // class radius L, > 0

  static SmoothnessClass sobolev(double beta, double radius);
  static SmoothnessClass supersmooth(double alpha, double r, double radius);
};

//! Decay family of a noise characteristic function:
//!   polynomial  |Phi^g(u)| ~ |u|^{-sigma},        sigma > 1
//!   exponential |Phi^g(u)| ~ exp(-gamma |u|^s),   gamma > 0, s > 0
struct SmoothnessDescriptor {
  enum class Tag { polynomial, exponential };

  Tag tag = Tag::polynomial;
  double sigma = 2.0;
  double gamma = 1.0;
  double s = 1.0;

  static SmoothnessDescriptor polynomial(double sigma);
  static SmoothnessDescriptor exponential(double gamma, double s);
};

//! Additive noise model. Three kinds:
//!   laplace_k  k-fold Laplace convolution, cf (1 + (scale u)^2 / k)^{-k},
//!              variance 2 scale^2 for every k
//!   gaussian   N(loc, scale^2)
//!   none       degenerate at 0 (direct observation), cf identically 1
//! Each kind carries a default smoothness descriptor (polynomial sigma = 2k for
//! laplace_k, exponential gamma = scale^2/2 and s = 2 for gaussian) which a
//! JSON descriptor may override.
struct NoiseModel {
  std::string kind = "none";
  int k = 1;
  double scale = 1.0;
  double loc = 0.0;
  std::optional<SmoothnessDescriptor> smoothness;

  static NoiseModel laplace(int k, double scale, double loc = 0.0);
  static NoiseModel gaussian(double loc, double scale);
  static NoiseModel none();

  complex cf(double u) const;
  double density(double x) const;
  double sample(Rng& rng) const;
  double variance() const;

  //! Attached descriptor, or the kind's default. Throws for kind "none".
  SmoothnessDescriptor descriptor() const;
  NoiseModel with_smoothness(const SmoothnessDescriptor& d) const;
};

//! Construction parameters of a density model, for serialization.
//! Perturbed models are built programmatically and have no descriptor;
//! asking for one throws std::invalid_argument.
struct MixtureComponent {
  double weight = 1.0;
  double loc = 0.0;
  double scale = 1.0;
};

struct ModelInfo {
  std::string kind;  // "gaussian" | "laplace_k" | "gaussian_mixture"
  double loc = 0.0;
  double scale = 1.0;
  int k = 1;
  std::vector<MixtureComponent> components;
};

namespace detail {

struct DensityImpl {
  virtual ~DensityImpl() = default;
  virtual complex cf(double u) const = 0;
  virtual double density(double x) const = 0;
  virtual double sample(Rng& rng) const = 0;
  virtual double mean() const = 0;
  virtual double variance() const = 0;
  virtual std::string kind() const = 0;
  virtual ModelInfo info() const = 0;
};

}  // namespace detail

//! Immutable signal density. Copies share the implementation; an optional
//! smoothness class rides along for procedures that need one (bandwidth
//! selection, membership checks, the F-function admissibility rule).
class DensityModel {
 public:
  explicit DensityModel(std::shared_ptr<const detail::DensityImpl> impl,
                        std::optional<SmoothnessClass> cls = std::nullopt);

  static DensityModel gaussian(double loc, double scale);
  static DensityModel laplace(int k, double scale, double loc = 0.0);
  static DensityModel gaussian_mixture(const std::vector<MixtureComponent>& parts);

  complex cf(double u) const { return impl_->cf(u); }
  double density(double x) const { return impl_->density(x); }
  double sample(Rng& rng) const { return impl_->sample(rng); }
  double mean() const { return impl_->mean(); }
  double variance() const { return impl_->variance(); }
  std::string kind() const { return impl_->kind(); }
  ModelInfo info() const { return impl_->info(); }

  const std::optional<SmoothnessClass>& smoothness() const { return cls_; }
  DensityModel with_smoothness(const SmoothnessClass& cls) const;

  //! Smoothness class required (throws std::invalid_argument if absent).
  const SmoothnessClass& required_smoothness() const;

 private:
  std::shared_ptr<const detail::DensityImpl> impl_;
  std::optional<SmoothnessClass> cls_;
};

//! A data set: observed values plus the seed that generated them (0 when the
//! values came from a file).
struct Sample {
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.size(); }
};

//! n draws from the signal density alone.
Sample sample_signal(const DensityModel& f, std::size_t n, Rng& rng);

//! n draws of Y = X + eps, X ~ f, eps ~ g independent.
Sample sample_observed(const DensityModel& f, const NoiseModel& g, std::size_t n,
                       Rng& rng);

//! Numerical check that a density lies in its declared smoothness class.
//! value approximates the class functional; indeterminate is set when the
//! quadrature could not bracket the tail well enough to call it.
struct MembershipResult {
  double value = 0.0;
  bool pass = false;
  bool indeterminate = false;
};

MembershipResult check_smoothness_membership(const DensityModel& f);
MembershipResult check_smoothness_membership(const DensityModel& f,
                                             const SmoothnessClass& cls);

}  // namespace deconv
