#pragma once

#include <cmath>
#include <cstdint>

namespace splatsim {

// Counter-based RNG. Every draw is a pure function of (seed, stream, counter),
// so parallel generation and regeneration from a file both give identical
// streams, independent of platform or standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Pareto with given shape (alpha) and scale (minimum value).
  double pareto(double shape, double scale) {
    double u = uniform();
    return scale * std::pow(1.0 - u, -1.0 / shape);
  }

  // Log-normal parameterized by median (scale) and sigma of log (shape).
  double lognormal(double shape, double scale) {
    return scale * std::exp(shape * normal());
  }

  // Standard normal via Box-Muller (portable, unlike std::normal_distribution).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// FNV-1a over raw bytes; used to freeze golden digests of generated fixtures.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace splatsim
