#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "deconv/models.hpp"
#include "doctest.h"

using namespace deconv;

namespace {

// Trapezoid quadrature of a density-like function over [lo, hi].
template <typename F>
double quad(F f, double lo, double hi, int panels) {
  const double dx = (hi - lo) / panels;
  double acc = 0.5 * (f(lo) + f(hi));
  for (int j = 1; j < panels; ++j) acc += f(lo + j * dx);
  return acc * dx;
}

}  // namespace

TEST_CASE("smoothness class factories validate their parameters") {
  CHECK_NOTHROW(SmoothnessClass::sobolev(1.0, 2.0));
  CHECK_NOTHROW(SmoothnessClass::supersmooth(0.4, 2.0, 2.0));
  CHECK_THROWS_AS(SmoothnessClass::sobolev(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessClass::sobolev(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessClass::supersmooth(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessClass::supersmooth(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessDescriptor::polynomial(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessDescriptor::exponential(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("laplace_k noise cf, variance and density anchors") {
  const NoiseModel g1 = NoiseModel::laplace(1, 1.0);
  CHECK(g1.cf(1.0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g1.cf(1.0).imag() == doctest::Approx(0.0));
  CHECK(g1.variance() == doctest::Approx(2.0));
  CHECK(g1.density(0.0) == doctest::Approx(0.5).epsilon(1e-9));

  const NoiseModel g3 = NoiseModel::laplace(3, 2.0);
  CHECK(g3.cf(0.8).real() == doctest::Approx(0.15708669025651065).epsilon(1e-12));
  CHECK(g3.variance() == doctest::Approx(8.0));  // 2 scale^2 for every k

  // Density integrates to one and reproduces the variance for k > 1.
  const double mass = quad([&](double x) { return g3.density(x); }, -60.0, 60.0, 40000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  const double var =
      quad([&](double x) { return x * x * g3.density(x); }, -60.0, 60.0, 40000);
  CHECK(var == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("laplace_k noise samples match the gamma-difference construction") {
  const NoiseModel g = NoiseModel::laplace(2, 1.5, 0.25);
  Rng rng(42);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.sample(rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 0.25) < 5.0 * std::sqrt(4.5 / n));
  CHECK(std::abs(var - 4.5) < 0.05 * 4.5);
}

TEST_CASE("gaussian noise and degenerate noise") {
  const NoiseModel g = NoiseModel::gaussian(0.4, 1.2);
  CHECK(std::abs(g.cf(1.3)) == doctest::Approx(0.2961764166502667).epsilon(1e-12));
  CHECK(std::arg(g.cf(1.3)) == doctest::Approx(1.3 * 0.4).epsilon(1e-12));
  CHECK(g.variance() == doctest::Approx(1.44));

  const NoiseModel none = NoiseModel::none();
  CHECK(none.cf(7.3) == complex(1.0, 0.0));
  CHECK(none.variance() == 0.0);
  Rng rng(1);
  CHECK(none.sample(rng) == 0.0);
}

TEST_CASE("noise descriptors default by kind and can be overridden") {
  const SmoothnessDescriptor d3 = NoiseModel::laplace(3, 0.25).descriptor();
  CHECK(d3.tag == SmoothnessDescriptor::Tag::polynomial);
  CHECK(d3.sigma == doctest::Approx(6.0));

  const SmoothnessDescriptor dg = NoiseModel::gaussian(0.0, 2.0).descriptor();
  CHECK(dg.tag == SmoothnessDescriptor::Tag::exponential);
  CHECK(dg.gamma == doctest::Approx(2.0));
  CHECK(dg.s == doctest::Approx(2.0));

  const NoiseModel widened = NoiseModel::laplace(1, 1.0).with_smoothness(
      SmoothnessDescriptor::polynomial(3.0));
  CHECK(widened.descriptor().sigma == doctest::Approx(3.0));

  CHECK_THROWS_AS(NoiseModel::none().descriptor(), std::invalid_argument);
}

TEST_CASE("gaussian density model anchors") {
  const DensityModel f = DensityModel::gaussian(0.0, 1.0);
  CHECK(f.density(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(f.cf(1.0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(f.mean() == 0.0);
  CHECK(f.variance() == 1.0);
  CHECK(f.kind() == "gaussian");

  const DensityModel shifted = DensityModel::gaussian(2.0, 0.5);
  CHECK(shifted.mean() == doctest::Approx(2.0));
  CHECK(shifted.variance() == doctest::Approx(0.25));
  CHECK(std::arg(shifted.cf(0.7)) == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("laplace_k density model: cf is the k-fold Laplace power") {
  const DensityModel f = DensityModel::laplace(10, 2.0);
  CHECK(f.cf(0.8).real() ==
        doctest::Approx(std::pow(1.0 + (1.6 * 1.6) / 10.0, -10.0)).epsilon(1e-12));
  CHECK(f.variance() == doctest::Approx(8.0));
  CHECK(f.kind() == "laplace_k");
  const double mass = quad([&](double x) { return f.density(x); }, -50.0, 50.0, 40000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  Rng rng(7);
  const Sample s = sample_signal(f, 100000, rng);
  double sum = 0.0, sum_sq = 0.0;
  for (const double x : s.values) {
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / s.size();
  CHECK(std::abs(mean) < 5.0 * std::sqrt(8.0 / s.size()));
  CHECK(std::abs(sum_sq / s.size() - mean * mean - 8.0) < 0.4);
}

TEST_CASE("gaussian mixture: moments, cf, weight validation") {
  const DensityModel f =
      DensityModel::gaussian_mixture({{0.5, -1.0, 0.5}, {0.5, 1.0, 0.5}});
  CHECK(f.mean() == doctest::Approx(0.0));
  // Law of total variance: 0.25 + 1.
  CHECK(f.variance() == doctest::Approx(1.25));
  // cf = cos(u) e^{-u^2/8} for this symmetric pair.
  const double u = 0.9;
  CHECK(f.cf(u).real() ==
        doctest::Approx(std::cos(u) * std::exp(-0.25 * 0.5 * u * u)).epsilon(1e-12));
  CHECK(f.cf(u).imag() == doctest::Approx(0.0).epsilon(1e-14));
  const ModelInfo info = f.info();
  REQUIRE(info.components.size() == 2);
  CHECK(info.components[0].weight == doctest::Approx(0.5));

  const double mass = quad([&](double x) { return f.density(x); }, -12.0, 12.0, 20000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

  Rng rng(11);
  const Sample s = sample_signal(f, 100000, rng);
  double sum = 0.0, sum_sq = 0.0;
  for (const double x : s.values) {
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / s.size()) < 5.0 * std::sqrt(1.25 / s.size()));
  CHECK(std::abs(sum_sq / s.size() - 1.25) < 0.03);

  CHECK_THROWS_AS(DensityModel::gaussian_mixture({}), std::invalid_argument);
  CHECK_THROWS_AS(DensityModel::gaussian_mixture({{-1.0, 0.0, 1.0}}),
                  std::invalid_argument);
  // Weights must already sum to one; no silent normalization.
  CHECK_THROWS_AS(DensityModel::gaussian_mixture({{1.0, -1.0, 0.5}, {1.0, 1.0, 0.5}}),
                  std::invalid_argument);
}

TEST_CASE("sample_observed adds independent noise and records the lineage") {
  const DensityModel f = DensityModel::gaussian(1.0, 1.0);
  const NoiseModel g = NoiseModel::laplace(1, 1.0);
  Rng a(99), b(99);
  const Sample s1 = sample_observed(f, g, 5000, a);
  const Sample s2 = sample_observed(f, g, 5000, b);
  REQUIRE(s1.size() == 5000);
  CHECK(s1.values == s2.values);

  double sum = 0.0, sum_sq = 0.0;
  for (const double y : s1.values) {
    sum += y;
    sum_sq += y * y;
  }
  const double mean = sum / s1.size();
  const double var = sum_sq / s1.size() - mean * mean;
  CHECK(std::abs(mean - 1.0) < 5.0 * std::sqrt(3.0 / s1.size()));
  CHECK(std::abs(var - 3.0) < 0.2);  // Var Y = 1 + 2
}

TEST_CASE("smoothness membership check accepts true members and flags outsiders") {
  const DensityModel in_class = DensityModel::gaussian(0.0, 1.0)
                                    .with_smoothness(SmoothnessClass::sobolev(1.0, 0.2));
  const MembershipResult ok = check_smoothness_membership(in_class);
  CHECK(ok.pass);
  CHECK_FALSE(ok.indeterminate);
  // (1/2pi) int |Phi|^2 u^2 du = 1/(4 sqrt(pi)) for N(0,1).
  CHECK(ok.value == doctest::Approx(0.14104739588693907).epsilon(1e-4));

  const MembershipResult tight = check_smoothness_membership(
      DensityModel::gaussian(0.0, 1.0), SmoothnessClass::sobolev(1.0, 0.1));
  CHECK_FALSE(tight.pass);

  const MembershipResult super = check_smoothness_membership(
      DensityModel::gaussian(0.0, 1.0), SmoothnessClass::supersmooth(0.4, 2.0, 2.0));
  CHECK(super.pass);

  // Polynomial-tailed spectrum against a Sobolev class with slow decay.
  const MembershipResult lap = check_smoothness_membership(
      DensityModel::laplace(1, 0.5), SmoothnessClass::sobolev(1.45, 54.0));
  CHECK(lap.pass);

  CHECK_THROWS_AS(check_smoothness_membership(DensityModel::gaussian(0.0, 1.0)),
                  std::invalid_argument);  // no class attached
}

TEST_CASE("required_smoothness throws without an attached class") {
  const DensityModel f = DensityModel::gaussian(0.0, 1.0);
  CHECK_THROWS_AS(f.required_smoothness(), std::invalid_argument);
  const DensityModel g = f.with_smoothness(SmoothnessClass::sobolev(2.0, 1.0));
  CHECK(g.required_smoothness().beta == doctest::Approx(2.0));
  // with_smoothness copies share the implementation.
  CHECK(g.density(0.3) == f.density(0.3));
}
