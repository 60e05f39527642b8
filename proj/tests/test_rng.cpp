#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <vector>

#include "deconv/rng.hpp"
#include "doctest.h"

using deconv::Rng;

TEST_CASE("same seed gives the same stream, different seeds differ") {
  Rng a(12345), b(12345), c(54321);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("derive is pure: it does not consume parent state") {
  Rng parent(77);
  Rng fresh(77);
  (void)parent.derive(3);
  (void)parent.derive(9);
  for (int i = 0; i < 16; ++i) CHECK(parent.next_u64() == fresh.next_u64());
}

TEST_CASE("derived streams are addressed by key") {
  const Rng parent(2024);
  Rng d1 = parent.derive(5);
  Rng d1_again = parent.derive(5);
  Rng d2 = parent.derive(6);
  bool same = true, diff = false;
  for (int i = 0; i < 32; ++i) {
    const std::uint64_t v = d1.next_u64();
    same = same && (v == d1_again.next_u64());
    diff = diff || (v != d2.next_u64());
  }
  CHECK(same);
  CHECK(diff);
  CHECK(parent.derive(5).lineage_seed() == d1.lineage_seed());
  CHECK(parent.derive(5).lineage_seed() != parent.lineage_seed());
}

TEST_CASE("uniform01 lies in [0,1) with the right first moments") {
  Rng rng(1);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 5 standard errors of the Monte Carlo mean/variance.
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("normal sampler matches N(0,1) moments") {
  Rng rng(2);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sum_sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sum_4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("exponential and gamma_int have mean k * scale, variance k * scale^2") {
  Rng rng(3);
  const int n = 100000;
  const double scale = 0.7;
  const int k = 4;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma_int(k, scale);
    REQUIRE(g > 0.0);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double mean_se = scale * std::sqrt(static_cast<double>(k) / n);
  CHECK(std::abs(mean - k * scale) < 5.0 * mean_se);
  CHECK(std::abs(var - k * scale * scale) < 0.05 * k * scale * scale);
}

TEST_CASE("rademacher is a fair sign") {
  Rng rng(4);
  int pos = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int s = rng.rademacher();
    REQUIRE((s == 1 || s == -1));
    if (s == 1) ++pos;
  }
  CHECK(std::abs(pos - n / 2) < 5.0 * std::sqrt(0.25 * n));
}

TEST_CASE("uniform_below stays in range and is roughly flat") {
  Rng rng(5);
  const std::uint64_t bound = 7;
  std::vector<int> counts(bound, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = rng.uniform_below(bound);
    REQUIRE(v < bound);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) CHECK(std::abs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
}
