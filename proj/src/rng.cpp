#include "csikit/rng.hpp"

#include <cmath>

namespace csikit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::derive(std::string_view name) const { return Rng(splitmix64(seed_ ^ fnv1a64(name))); }

Rng Rng::derive(std::uint64_t index) const {
  return Rng(splitmix64(seed_ ^ splitmix64(index + 0x51ED270B5BB0E995ULL)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log stays finite.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::uniform_index(std::size_t n) {
  const std::uint64_t bound = n == 0 ? 0 : (0ULL - n) % n;  // 2^64 mod n
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < bound);
  return static_cast<std::size_t>(x % n);
}

}  // namespace csikit
