#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "hypext/geom.hpp"

namespace hypext {

// splitmix64; every Monte Carlo draw in the project is derived from one root
// seed through named substreams plus a sample index, so results do not depend
// on thread count or on the order in which samples are evaluated.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // burn-in decorrelates nearby seeds
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    // Box-Muller, one value per call
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // uniform direction on S^{d-1} in R^d, d in {2,3}
  Vec unit_vector(int d) {
    if (d == 2) {
      const double t = uniform(0.0, 2.0 * std::numbers::pi);
      return Vec{std::cos(t), std::sin(t)};
    }
    const double z = uniform(-1.0, 1.0);
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec{r * std::cos(t), r * std::sin(t), z};
  }

  // uniform in the Euclidean ball of given radius in R^d
  Vec ball_point(int d, double radius) {
    const double u = uniform01();
    const double r = radius * std::pow(u, 1.0 / d);
    return r * unit_vector(d);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed of the named substream of a root seed.
inline std::uint64_t substream(std::uint64_t root, std::string_view name) {
  std::uint64_t s = root ^ fnv1a(name);
  return splitmix64(s);
}

// Independent generator for sample `index` of a substream.
inline Rng rng_at(std::uint64_t stream_seed, std::uint64_t index) {
  std::uint64_t s = stream_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  return Rng(splitmix64(s));
}

}  // namespace hypext
