#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace csikit {

/// Deterministic random stream with named-substream derivation.
///
/// Every stochastic stage derives its own stream from the master seed via
/// `derive("stage-name")`, so adding or reordering stages never perturbs the
/// draws seen by another stage.  All sampling helpers are implemented on top
/// of std::mt19937_64 raw output only (no std::*_distribution), which keeps
/// sequences identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  Rng derive(std::string_view name) const;
  Rng derive(std::uint64_t index) const;

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  /// Standard normal via Box-Muller (second value cached).
  double gaussian();

  /// Uniform integer in [0, n); unbiased via rejection. n must be > 0.
  std::size_t uniform_index(std::size_t n);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace csikit
