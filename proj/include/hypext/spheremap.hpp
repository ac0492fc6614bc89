#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypext/geom.hpp"
#include "hypext/hyperbolic.hpp"

namespace hypext {

// Quadrature grid on S^n, n in {1, 2}. The circle grid is the uniform
// (trapezoid) rule; the sphere grid is Gauss-Legendre in the latitude
// times a uniform longitude rule.
struct SphereGrid {
  int dim = 1;  // n
  std::vector<Vec> nodes;
  std::vector<double> weights;
  int lat_count = 0, lon_count = 0;  // structure of the n = 2 grid

  static SphereGrid circle(int m);
  static SphereGrid sphere(int lats, int lons);

  int size() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;
  // Largest distance between grid-adjacent nodes; sets the default diagonal
  // cutoff of the Gagliardo sum and the node-scale oscillation margin.
  double max_neighbor_spacing() const;
};

// Compact target M in R^nu with a nearest-point retraction on a tube.
class ManifoldTarget {
 public:
  static ManifoldTarget circle();
  static ManifoldTarget sphere();
  static ManifoldTarget ellipse(double a, double b);

  const std::string& name() const { return name_; }
  int ambient_dim() const { return ambient_dim_; }
  double tube_radius() const { return tube_radius_; }

  double distance_to(const Vec& y) const { return distance_(y); }
  Vec retract(const Vec& y) const { return retract_(y); }
  Mat retract_jacobian(const Vec& y) const { return retract_jacobian_(y); }

  // Lipschitz constant of the retraction on the iota-tube. Closed form for
  // the round targets, sampled for the ellipse.
  double lipschitz_bound(double iota) const { return lipschitz_(iota); }

 private:
  std::string name_;
  int ambient_dim_ = 0;
  double tube_radius_ = 0;
  std::function<double(const Vec&)> distance_;
  std::function<Vec(const Vec&)> retract_;
  std::function<Mat(const Vec&)> retract_jacobian_;
  std::function<double(double)> lipschitz_;
};

// Test-corpus map descriptor, parseable from the CLI config.
struct MapDescriptor {
  enum class Kind { kConstant, kCircleDegree, kSphereDegree, kBubble, kEllipseCurve };
  Kind kind = Kind::kCircleDegree;
  int degree = 1;
  Vec constant;          // kConstant
  Vec bubble_center;     // kBubble: compose the degree map with T_a
  double ellipse_a = 2.0, ellipse_b = 1.0;

  int boundary_dim() const;  // n of the domain sphere
  static MapDescriptor parse(const std::string& text);
  std::string to_string() const;
};

// A sampled map u : S^n -> R^nu, optionally with a closed form and its
// derivative (as the ambient nu x (n+1) matrix valid on tangent vectors).
struct SphereMap {
  SphereGrid grid;
  std::vector<Vec> values;
  ManifoldTarget target;
  std::function<Vec(const Vec&)> evaluator;
  std::function<Mat(const Vec&)> derivative;

  int dim() const { return grid.dim; }
  int value_dim() const { return target.ambient_dim(); }
  bool has_evaluator() const { return static_cast<bool>(evaluator); }
  bool has_derivative() const { return static_cast<bool>(derivative); }

  // Closed form when present, grid interpolation otherwise.
  Vec value_at(const Vec& unit) const;
  // max |u_i - u_j| over grid-adjacent nodes
  double node_oscillation() const;
  bool target_valued(double tol = 1e-9) const;
  // min over node values of |v - u_i|; the discrete stand-in for
  // dist(v, u(S^n))
  double distance_to_range(const Vec& v) const;
};

SphereMap make_test_map(const MapDescriptor& desc, const SphereGrid& grid,
                        const ManifoldTarget& target);
// Convenience: target inferred from the descriptor.
SphereMap make_test_map(const MapDescriptor& desc, const SphereGrid& grid);

// u o T restricted to the boundary sphere.
SphereMap compose_with_mobius(const SphereMap& u, const MobiusTransform& t);

// Copy with the closed form stripped: off-node values come from grid
// interpolation, the quadrature-quality stress case.
SphereMap values_only(const SphereMap& u);

struct GagliardoEstimate {
  double value = 0;
  int grid_resolution = 0;
  double diagonal_cutoff = 0;
  double excluded_mass_fraction = 0;
  bool cutoff_warning = false;  // excluded mass above 5%
};

// Double-sum quadrature of the Gagliardo integral with exponents
// p = n + 1 over |y - z|^{2n}, excluding near-diagonal pairs.
GagliardoEstimate gagliardo_seminorm(const SphereMap& u);
GagliardoEstimate gagliardo_seminorm(const SphereMap& u, double diagonal_cutoff);
// Serial reference implementation (identical results by construction).
GagliardoEstimate gagliardo_seminorm_serial(const SphereMap& u, double diagonal_cutoff);

// int_{S^n} |Du|^n with |Du| the largest singular value of the tangential
// derivative.
double w1n_energy(const SphereMap& u);

Mat tangent_projector(const Vec& unit);

}  // namespace hypext
