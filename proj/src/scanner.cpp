#include "hypext/scanner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hypext/parallel.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<BallPoint> sample_hyperbolic_sphere(const BallPoint& center,
                                                double radius, int samples,
                                                std::uint64_t seed) {
  const int d = center.ambient_dim();
  const double re = euclidean_radius(radius);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  Rng rng(substream(seed, "sphere-sampling"));
  const double shift = rng.uniform(0.0, 2.0 * kPi);
  std::vector<BallPoint> pts;
  pts.reserve(samples);
  if (d == 2) {
    for (int i = 0; i < samples; ++i) {
      const double t = shift + 2.0 * kPi * i / samples;
      pts.push_back(back.apply(BallPoint(Vec{re * std::cos(t), re * std::sin(t)})));
    }
  } else {
    // Fibonacci sphere with a seeded longitude shift
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / samples;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = shift + golden * i;
      pts.push_back(back.apply(
          BallPoint(Vec{re * s * std::cos(t), re * s * std::sin(t), re * z})));
    }
  }
  return pts;
}

double max_scannable_radius(const BallPoint& center) {
  // Points of the sphere reach hyperbolic distance d(0,center) + r from the
  // origin; that must stay below the evaluable limit.
  const double limit = hyperbolic_radius(HyperharmonicField::kEvaluableLimit);
  return limit - hyperbolic_distance(BallPoint::origin(center.ambient_dim()), center);
}

double sup_distance_on_sphere(const HyperharmonicField& field,
                              const BallPoint& center, double radius,
                              int samples, std::uint64_t seed) {
  const double usable = max_scannable_radius(center);
  if (radius >= usable)
    throw std::runtime_error(
        "sup_distance_on_sphere: sphere of radius " + std::to_string(radius) +
        " exits the evaluable region; largest usable radius around this "
        "center is " + std::to_string(usable));
  const auto pts = sample_hyperbolic_sphere(center, radius, samples, seed);
  return par::max_index(pts.size(), [&](std::size_t i) {
    return field.boundary().distance_to_range(field.evaluate(pts[i]));
  });
}

bool SupDistanceProbe::converged(double rel) const {
  const double scale = std::max({value, refined, 1e-12});
  return std::fabs(value - refined) <= rel * scale;
}

SupDistanceProbe sup_distance_probe(const HyperharmonicField& field,
                                    const BallPoint& center, double radius,
                                    int samples, std::uint64_t seed) {
  return SupDistanceProbe{
      sup_distance_on_sphere(field, center, radius, samples, seed),
      sup_distance_on_sphere(field, center, radius, 2 * samples, seed)};
}

RadiusScan scan_spheres(const HyperharmonicField& field, const BallPoint& center,
                        double r_min, double r_max, double step, int samples,
                        std::uint64_t seed) {
  RadiusScan scan;
  for (double r = r_min; r <= r_max + 1e-12; r += step) {
    scan.radii.push_back(r);
    scan.sup_dist.push_back(
        sup_distance_on_sphere(field, center, r, samples, seed));
  }
  return scan;
}

std::vector<DensityCheck> good_sphere_density_check(
    const HyperharmonicField& field, const BallPoint& center,
    const std::vector<double>& rhos, double seminorm, double step, int samples,
    std::uint64_t seed) {
  double rho_max = 0;
  for (double r : rhos) rho_max = std::max(rho_max, r);
  const int n = field.boundary_dim();
  const RadiusScan scan =
      scan_spheres(field, center, step, rho_max, step, samples, seed);

  std::vector<DensityCheck> out;
  for (double rho : rhos) {
    // trapezoid on (0, rho]; the integrand at r = 0 is dist(Hu(center), range)
    const double at_zero =
        field.boundary().distance_to_range(field.evaluate(center));
    double integral = 0;
    double prev_r = 0, prev_v = at_zero;
    for (std::size_t i = 0; i < scan.radii.size() && scan.radii[i] <= rho + 1e-12;
         ++i) {
      integral += 0.5 * (prev_v + scan.sup_dist[i]) * (scan.radii[i] - prev_r);
      prev_r = scan.radii[i];
      prev_v = scan.sup_dist[i];
    }
    DensityCheck c;
    c.rho = rho;
    c.lhs_average = integral / rho;
    c.ratio = c.lhs_average * (1.0 + std::pow(rho, 1.0 / (n + 1))) /
              std::pow(seminorm, 1.0 / (n + 1));
    out.push_back(c);
  }
  return out;
}

double density_check_constant(const HyperharmonicField& field,
                              const BallPoint& center,
                              const std::vector<double>& rhos, double seminorm,
                              double step, int samples, std::uint64_t seed) {
  double c1 = 0;
  for (const auto& c :
       good_sphere_density_check(field, center, rhos, seminorm, step, samples, seed))
    c1 = std::max(c1, c.ratio);
  return c1;
}

W1nCheck w1n_good_radius_check(const HyperharmonicField& field,
                               const SphereMap& u, const BallPoint& center,
                               double rho, double step, int samples,
                               std::uint64_t seed) {
  const int n = field.boundary_dim();
  if (!u.has_derivative() && !u.has_evaluator())
    throw std::invalid_argument("w1n_good_radius_check: map has no derivative information");
  const RadiusScan scan = scan_spheres(field, center, step, rho, step, samples, seed);
  const double at_zero = field.boundary().distance_to_range(field.evaluate(center));
  double integral = 0;
  double prev_r = 0, prev_v = at_zero;
  for (std::size_t i = 0; i < scan.radii.size(); ++i) {
    integral += 0.5 * (prev_v + scan.sup_dist[i]) * (scan.radii[i] - prev_r);
    prev_r = scan.radii[i];
    prev_v = scan.sup_dist[i];
  }
  W1nCheck c;
  c.rho = rho;
  c.lhs_integral = integral;
  c.energy = w1n_energy(u);
  c.empirical_constant = integral / (std::pow(c.energy, 1.0 / n) *
                                     std::pow(rho, 1.0 - 1.0 / n));
  return c;
}

double choose_rho_formula(int n, double seminorm, double iota, double c1) {
  if (iota <= 0 || c1 <= 0)
    throw std::invalid_argument("choose_rho: iota and c1 must be positive");
  return 0.5 * std::pow(8.0 * c1 / iota, n + 1) * seminorm;
}

double choose_rho_formula_w1n(int n, double energy, double iota, double cw) {
  if (iota <= 0 || cw <= 0)
    throw std::invalid_argument("choose_rho: iota and cw must be positive");
  return 0.5 * std::pow(8.0 * cw / iota, n) * energy;
}

double bad_radius_measure(const HyperharmonicField& field, const BallPoint& center,
                          double rho, double step, double iota_eff, int samples,
                          std::uint64_t seed, double certified_good_radius) {
  const double d0 = hyperbolic_distance(
      BallPoint::origin(center.ambient_dim()), center);
  double bad = 0;
  for (double r = rho + 0.5 * step; r < 2.0 * rho; r += step) {
    // a sphere that stays outside the certified ball around 0 is good by
    // the compactness of the bad set; its closest approach to 0 is |r - d0|
    if (std::fabs(r - d0) >= certified_good_radius) continue;
    const double sup = sup_distance_on_sphere(field, center, r, samples, seed);
    if (sup >= iota_eff) bad += step;
  }
  return std::min(bad, rho);
}

RhoSelection choose_rho_verified(const HyperharmonicField& field, double rho_formula,
                                 double iota_eff, double certified_good_radius,
                                 int centers, double center_spread, double step,
                                 int samples, std::uint64_t seed, double rho_cap) {
  RhoSelection sel;
  sel.rho_formula = rho_formula;
  const int d = field.ambient_dim();
  std::vector<BallPoint> test_centers;
  test_centers.push_back(BallPoint::origin(d));
  const std::uint64_t stream = substream(seed, "verify-centers");
  for (int i = 0; i < centers; ++i) {
    Rng rng = rng_at(stream, i);
    // hyperbolic-uniform radius by inverting the volume along the draw
    const double u = rng.uniform01();
    double lo = 0, hi = center_spread;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sinh_power_integral(d - 1, mid) <=
       u * sinh_power_integral(d - 1, center_spread))
          ? lo = mid
          : hi = mid;
    }
    test_centers.push_back(
        BallPoint(euclidean_radius(0.5 * (lo + hi)) * rng.unit_vector(d)));
  }

  double rho = rho_formula;
  while (true) {
    double worst = 0;
    for (const BallPoint& c : test_centers)
      worst = std::max(worst, bad_radius_measure(field, c, rho, step, iota_eff,
                                                 samples, seed, certified_good_radius));
    sel.bad_measures.push_back(worst);
    if (worst <= 0.25 * rho) {
      sel.rho = rho;
      return sel;
    }
    rho *= 2.0;
    ++sel.doublings;
    if (rho > rho_cap)
      throw std::runtime_error(
          "choose_rho: verification kept failing up to the cap rho = " +
          std::to_string(rho_cap));
  }
}

double enclosing_bad_radius(const HyperharmonicField& field, double iota_eff,
                            double step, double tail, int samples,
                            std::uint64_t seed) {
  const int d = field.ambient_dim();
  const BallPoint origin = BallPoint::origin(d);
  const double max_r = max_scannable_radius(origin) - step;
  // scan outward lazily: the candidate is the radius after the last bad
  // sphere, certified once a full clean window of length `tail` follows it
  double candidate = 0;
  double last_scanned = 0;
  for (double r = step; r <= max_r; r += step) {
    const double sup = sup_distance_on_sphere(field, origin, r, samples, seed);
    last_scanned = r;
    if (sup >= iota_eff) {
      candidate = r + step;
    } else if (r >= candidate + tail) {
      return candidate;
    }
  }
  if (candidate == 0 && last_scanned > 0) return 0.0;
  throw std::runtime_error(
      "enclosing_bad_radius: no radius with a clean tail within the scan "
      "budget; the map is too rough for the grid resolution");
}

}  // namespace hypext
