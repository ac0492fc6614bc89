#include "hypext/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

// Low-discrepancy point of the hyperbolic ball: Halton coordinates mapped to
// a hyperbolic-uniform radius and a uniform direction.
Vec halton_hyperbolic(std::uint64_t index, int d, double region_radius,
                      double angle_shift) {
  const double re = euclidean_radius(
      hyperbolic_uniform_radius(halton(index, 2), d - 1, region_radius));
  if (d == 2) {
    const double t = angle_shift + 2.0 * kPi * halton(index, 3);
    return Vec{re * std::cos(t), re * std::sin(t)};
  }
  const double z = 2.0 * halton(index, 3) - 1.0;
  const double t = angle_shift + 2.0 * kPi * halton(index, 5);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec{re * s * std::cos(t), re * s * std::sin(t), re * z};
}

Vec random_hyperbolic_point(Rng& rng, int d, double region_radius) {
  const double re = euclidean_radius(
      hyperbolic_uniform_radius(rng.uniform01(), d - 1, region_radius));
  return re * rng.unit_vector(d);
}

}  // namespace

int HyperbolicCovering::count_in_ball(const BallPoint& a, double sigma) const {
  int count = 0;
  for (const BallPoint& b : centers)
    if (hyperbolic_distance(a, b) <= sigma) ++count;
  return count;
}

double HyperbolicCovering::multiplicity_bound(double sigma) const {
  const int n = dim - 1;
  return sinh_power_integral(n, sigma + 0.5 * rho) /
         sinh_power_integral(n, 0.5 * rho);
}

double HyperbolicCovering::color_count_bound() const {
  const int n = dim - 1;
  return sinh_power_integral(n, 4.5 * rho) / sinh_power_integral(n, 0.5 * rho);
}

HyperbolicCovering build_covering(int ambient_dim, double region_radius,
                                  double rho, std::uint64_t seed) {
  if (rho <= 0) throw std::invalid_argument("build_covering: rho must be positive");
  if (region_radius >= 12.0) {
    const int n = ambient_dim - 1;
    const double projected =
        sinh_power_integral(n, region_radius + 0.5 * rho) /
        sinh_power_integral(n, 0.5 * rho);
    throw std::invalid_argument(
        "build_covering: region radius " + std::to_string(region_radius) +
        " exceeds the desk-scale guard (12); projected center count ~ " +
        std::to_string(projected));
  }

  HyperbolicCovering cov;
  cov.dim = ambient_dim;
  cov.rho = rho;
  cov.region_radius = region_radius;

  Rng shift_rng(substream(seed, "covering"));
  const double shift = shift_rng.uniform(0.0, 2.0 * kPi);

  // greedy packing: accept a candidate iff it keeps rho-separation; stop
  // after a long run of consecutive rejections
  cov.centers.push_back(BallPoint::origin(ambient_dim));
  int consecutive_rejects = 0;
  std::uint64_t index = 1;
  while (consecutive_rejects < 4096) {
    const BallPoint cand(
        halton_hyperbolic(index++, ambient_dim, region_radius, shift));
    bool ok = true;
    for (const BallPoint& c : cov.centers)
      if (hyperbolic_distance(cand, c) < rho) {
        ok = false;
        break;
      }
    if (ok) {
      cov.centers.push_back(cand);
      consecutive_rejects = 0;
    } else {
      ++consecutive_rejects;
    }
  }

  // Coverage repair: an uncovered point is at distance >= rho from every
  // center, so it is itself a legal center. Insert such points until a
  // fresh sample set certifies coverage.
  auto covered = [&](const BallPoint& x) {
    for (const BallPoint& c : cov.centers)
      if (hyperbolic_distance(c, x) < rho) return true;
    return false;
  };
  for (int round = 0; round < 64 && !cov.coverage_verified; ++round) {
    const std::uint64_t stream =
        substream(seed, "covering-check") + 131ULL * round;
    bool clean = true;
    for (int i = 0; i < 4096; ++i) {
      Rng rng = rng_at(stream, i);
      const BallPoint x(random_hyperbolic_point(rng, ambient_dim, region_radius));
      if (!covered(x)) {
        cov.centers.push_back(x);
        clean = false;
      }
    }
    cov.coverage_verified = clean;
  }
  if (!cov.coverage_verified)
    throw std::runtime_error(
        "build_covering: coverage could not be certified after repair rounds");

  // greedy coloring of the conflict graph (edge iff distance <= 4 rho),
  // ordered by distance from the origin; the distance test is repeated
  // instead of storing the adjacency, which keeps memory linear
  const int count = static_cast<int>(cov.centers.size());
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  const BallPoint origin = BallPoint::origin(ambient_dim);
  std::vector<double> dist0(count);
  for (int i = 0; i < count; ++i)
    dist0[i] = hyperbolic_distance(origin, cov.centers[i]);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return dist0[a] < dist0[b]; });

  cov.color_of.assign(count, -1);
  std::vector<char> used;
  for (int idx : order) {
    used.assign(cov.color_classes.size() + 1, 0);
    for (int j : order) {
      if (cov.color_of[j] < 0 || j == idx) continue;
      if (hyperbolic_distance(cov.centers[idx], cov.centers[j]) <= 4.0 * rho)
        if (cov.color_of[j] < static_cast<int>(used.size()))
          used[cov.color_of[j]] = 1;
    }
    int color = 0;
    while (color < static_cast<int>(used.size()) && used[color]) ++color;
    cov.color_of[idx] = color;
    if (color >= static_cast<int>(cov.color_classes.size()))
      cov.color_classes.resize(color + 1);
    cov.color_classes[color].push_back(idx);
  }
  return cov;
}

}  // namespace hypext
