#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "hypext/hyperbolic.hpp"
#include "hypext/spheremap.hpp"

namespace hypext {

struct NontangentialReport {
  Vec boundary_value;
  std::vector<double> radii;       // |x_j|
  std::vector<double> deviations;  // |Hu(x_j) - u(y)|
  // tail non-increasing within a slack factor
  bool tail_decreasing(int tail = 5, double slack = 1.10) const;
  double final_deviation() const { return deviations.back(); }
};

// The extension of a boundary map by the kernel (1-|x|^2)^n / |y-x|^{2n},
// normalized so that the quadrature is exact on constants. Quadrature runs
// on a ladder of refinements of the map grid; the rung is chosen so the
// node spacing resolves the kernel peak width ~ (1-|x|).
class HyperharmonicField {
 public:
  explicit HyperharmonicField(SphereMap boundary);
  ~HyperharmonicField();
  HyperharmonicField(HyperharmonicField&&) noexcept;

  const SphereMap& boundary() const { return boundary_; }
  int boundary_dim() const { return boundary_.dim(); }    // n
  int ambient_dim() const { return boundary_.dim() + 1; } // n+1
  int value_dim() const { return boundary_.value_dim(); }

  static constexpr double kEvaluableLimit = 1.0 - 1e-6;

  Vec evaluate(const BallPoint& x) const;
  // nu x (n+1) matrix, by differentiating the kernel under the sum.
  Mat derivative(const BallPoint& x) const;

  // Unnormalized quadrature of the kernel over the sphere, divided by
  // |S^n|; equals 1 in the continuum.
  double kernel_mass(const BallPoint& x) const;

  // max over the sample of |H(u o T)(x) - (Hu)(T x)|.
  double covariance_defect(const MobiusTransform& t,
                           std::span<const BallPoint> sample) const;

  // MC estimate of the hyperbolic Dirichlet energy over the hyperbolic ball
  // of the given radius; by conformal invariance this is the Euclidean
  // integral of |D Hu|^{n+1} over the Euclidean image ball.
  double hyperbolic_energy(int mc_samples, std::uint64_t seed,
                           double truncation_radius,
                           double* std_error = nullptr) const;

  NontangentialReport nontangential_check(const Vec& boundary_point,
                                          double alpha, int j_begin = 4,
                                          int j_end = 14) const;

 private:
  struct KernelTier;
  const KernelTier& tier_for(double r) const;
  void accumulate(const BallPoint& x, bool with_gradient, double* mass,
                  Vec* value, Mat* jac) const;

  SphereMap boundary_;
  std::vector<std::unique_ptr<KernelTier>> tiers_;
};

}  // namespace hypext
