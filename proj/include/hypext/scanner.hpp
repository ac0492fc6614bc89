#pragma once

#include <cstdint>
#include <vector>

#include "hypext/extension.hpp"

namespace hypext {

// Quasi-uniform sample of the hyperbolic sphere of radius r around a:
// seeded-rotated uniform angles (n=1) / Fibonacci points (n=2) on the
// origin-centered Euclidean sphere of radius tanh(r/2), pulled back
// through the translation that centers a.
std::vector<BallPoint> sample_hyperbolic_sphere(const BallPoint& center,
                                                double radius, int samples,
                                                std::uint64_t seed);

// Largest radius r such that the sphere around `center` stays inside the
// evaluable region of the field.
double max_scannable_radius(const BallPoint& center);

// sup over sphere samples of dist(Hu(x), u-range); throws when the sphere
// leaves the evaluable region, naming the largest usable radius.
double sup_distance_on_sphere(const HyperharmonicField& field,
                              const BallPoint& center, double radius,
                              int samples, std::uint64_t seed);

// Convergence probe: value at m samples and at 2m samples.
struct SupDistanceProbe {
  double value, refined;
  bool converged(double rel = 0.05) const;
};
SupDistanceProbe sup_distance_probe(const HyperharmonicField& field,
                                    const BallPoint& center, double radius,
                                    int samples, std::uint64_t seed);

struct RadiusScan {
  std::vector<double> radii;
  std::vector<double> sup_dist;
};
RadiusScan scan_spheres(const HyperharmonicField& field, const BallPoint& center,
                        double r_min, double r_max, double step, int samples,
                        std::uint64_t seed);

// (1/rho) int_0^rho sup dr against E^{1/(n+1)} / (1 + rho^{1/(n+1)}).
struct DensityCheck {
  double rho = 0;
  double lhs_average = 0;   // (1/rho) int_0^rho sup dr
  double ratio = 0;         // empirical constant at this rho
};
std::vector<DensityCheck> good_sphere_density_check(
    const HyperharmonicField& field, const BallPoint& center,
    const std::vector<double>& rhos, double seminorm, double step, int samples,
    std::uint64_t seed);

// The per-map empirical constant: max ratio over the probe set of radii.
double density_check_constant(const HyperharmonicField& field,
                              const BallPoint& center,
                              const std::vector<double>& rhos, double seminorm,
                              double step, int samples, std::uint64_t seed);

// int_0^rho sup dr <= C (int |Du|^n)^{1/n} rho^{1-1/n}; for n = 1 the
// right side is rho-independent.
struct W1nCheck {
  double rho = 0;
  double lhs_integral = 0;
  double energy = 0;        // int |Du|^n
  double empirical_constant = 0;
};
W1nCheck w1n_good_radius_check(const HyperharmonicField& field,
                               const SphereMap& u, const BallPoint& center,
                               double rho, double step, int samples,
                               std::uint64_t seed);

// rho = (1/2) (8 c1 / iota)^{n+1} E  (gagliardo mode)
double choose_rho_formula(int n, double seminorm, double iota, double c1);
// rho = (1/2) (8 cw / iota)^n int |Du|^n  (W^{1,n} mode)
double choose_rho_formula_w1n(int n, double energy, double iota, double cw);

// Lebesgue measure of {r in (rho, 2 rho) : sup dist >= iota_eff}. Radii
// whose sphere provably stays where dist < iota_eff (outside the certified
// ball around the origin) are counted good without evaluation.
double bad_radius_measure(const HyperharmonicField& field, const BallPoint& center,
                          double rho, double step, double iota_eff, int samples,
                          std::uint64_t seed, double certified_good_radius);

struct RhoSelection {
  double rho_formula = 0;
  double rho = 0;
  int doublings = 0;
  std::vector<double> bad_measures;  // worst measure at each attempted rho
};
// Formula value, then verify bad measure <= rho/4 at the origin plus
// random centers, doubling rho until it holds.
RhoSelection choose_rho_verified(const HyperharmonicField& field, double rho_formula,
                                 double iota_eff, double certified_good_radius,
                                 int centers, double center_spread, double step,
                                 int samples, std::uint64_t seed,
                                 double rho_cap);

// Smallest scanned radius such that every scanned sphere of radius in
// [rho_bar, rho_bar + tail] around the origin has sup dist < iota_eff.
double enclosing_bad_radius(const HyperharmonicField& field, double iota_eff,
                            double step, double tail, int samples,
                            std::uint64_t seed);

}  // namespace hypext
