#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace deconv {

//! Deterministic random stream with a stable cross-platform layout.
//!
//! xoshiro256++ seeded through splitmix64. The engine and every sampler are
//! spelled out here (instead of <random> distributions) because reproducibility
//! is part of the contract: a fixed seed must give byte-identical output on any
//! toolchain, and std:: distributions do not guarantee that.
//!
//! derive(key) spawns an independent stream from this stream's lineage seed,
//! so replicate streams can be addressed as derive(scenario).derive(rep)
//! without consuming state from the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : lineage_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  //! Independent stream addressed by (this stream's seed, key).
  Rng derive(std::uint64_t key) const {
    // splitmix64 of the combined words; any good 64-bit mix works here.
    std::uint64_t x = lineage_ ^ (0x9e3779b97f4a7c15ull + key);
    x = splitmix64(x);
    return Rng(x ^ key);
  }

  std::uint64_t lineage_seed() const { return lineage_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  //! Uniform integer in [0, bound). Rejection keeps it exactly unbiased.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t value = next_u64();
    while (value >= limit) value = next_u64();
    return value % bound;
  }

  //! Standard normal via Box-Muller; the sine partner is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
    const double angle = 2.0 * std::numbers::pi * uniform01();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  //! Exponential with the given scale (mean).
  double exponential(double scale) { return -scale * std::log(1.0 - uniform01()); }

  //! Gamma with integer shape k >= 1 and the given scale: sum of k exponentials.
  double gamma_int(int k, double scale) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += exponential(scale);
    return sum;
  }

  //! Fair sign in {-1, +1}.
  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t lineage_;
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace deconv
