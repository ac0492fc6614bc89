#pragma once

#include <cstdint>
#include <vector>

#include "hypext/hyperbolic.hpp"

namespace hypext {

// Greedy maximal packing of B^H_{region_radius}(0) by rho-separated centers
// together with a conflict coloring: within a color class all centers are
// more than 4 rho apart, so their 2 rho balls are disjoint.
struct HyperbolicCovering {
  int dim = 2;  // ambient
  double rho = 0;
  double region_radius = 0;
  std::vector<BallPoint> centers;
  std::vector<int> color_of;
  std::vector<std::vector<int>> color_classes;
  bool coverage_verified = false;

  int num_colors() const { return static_cast<int>(color_classes.size()); }
  // exact count of centers within hyperbolic distance sigma of a
  int count_in_ball(const BallPoint& a, double sigma) const;
  // Lemma-style volume-ratio bound on that count
  double multiplicity_bound(double sigma) const;
  // bound on the number of color classes
  double color_count_bound() const;
};

// region_radius is guarded below 12: the center count grows like
// exp(n * radius).
HyperbolicCovering build_covering(int ambient_dim, double region_radius,
                                  double rho, std::uint64_t seed);

}  // namespace hypext
