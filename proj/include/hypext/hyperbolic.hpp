#pragma once

#include <cstdint>

#include "hypext/geom.hpp"

namespace hypext {

// Points are rejected this close to the boundary sphere: (1 - |x|^2) loses
// all precision there and nothing downstream ever needs such points.
inline constexpr double kInteriorMargin = 1e-12;

// A point of the open unit ball B^{n+1}, the Poincare model of H^{n+1}.
class BallPoint {
 public:
  explicit BallPoint(const Vec& x);
  static BallPoint origin(int ambient_dim);

  const Vec& coords() const { return x_; }
  int ambient_dim() const { return x_.size(); }
  int boundary_dim() const { return x_.size() - 1; }  // n of S^n
  double norm() const { return x_.norm(); }
  double norm2() const { return x_.norm2(); }

 private:
  Vec x_;
};

// |S^n|: 2*pi for n = 1, 4*pi for n = 2.
double sphere_area(int n);

// d(x,y) = acosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))), in a form that is
// stable for nearby points (the naive acosh cancels catastrophically).
double hyperbolic_distance(const BallPoint& x, const BallPoint& y);

// Volume of a hyperbolic ball: |S^n| * int_0^radius sinh(r)^n dr.
double hyperbolic_ball_volume(int n, double radius);

// Density of the hyperbolic measure against Lebesgue: 2^{n+1}/(1-|x|^2)^{n+1}.
double hyperbolic_measure_density(int n, const BallPoint& x);

// |theta|_H = (1-|x|^2)/2 * |theta|; the factor turning Euclidean operator
// norms of derivatives into hyperbolic ones.
double dual_norm_factor(const BallPoint& x);

// Euclidean radius of the origin-centered hyperbolic sphere of radius rho.
inline double euclidean_radius(double rho) { return std::tanh(0.5 * rho); }
inline double hyperbolic_radius(double euclid) { return 2.0 * std::atanh(euclid); }

// Radius in (0, max_radius) distributed like the hyperbolic volume
// (inverse CDF of int sinh^n by bisection); u is a uniform draw.
double hyperbolic_uniform_radius(double u, int n, double max_radius);

// An element of the Moebius group of the ball, in the canonical form
// x -> R(T_a(x)) with R orthogonal and T_a the hyperbolic translation
// sending a to the origin.
class MobiusTransform {
 public:
  MobiusTransform(const Mat& rotation, const BallPoint& center);
  static MobiusTransform identity(int ambient_dim);
  static MobiusTransform translation(const BallPoint& a);  // (I, a)

  BallPoint apply(const BallPoint& x) const;
  // Action on the boundary sphere S^n (|y| = 1).
  Vec apply_boundary(const Vec& y) const;

  // Exact: (R, a)^{-1} = (R^T, -R a).
  MobiusTransform inverse() const;

  // this o inner, refit to canonical form: the center comes from evaluating
  // the composite at 0, the rotation from a polar fit of the residual.
  MobiusTransform compose_after(const MobiusTransform& inner) const;

  // |DT(x)| = (1-|T(x)|^2)/(1-|x|^2); all singular values of the Jacobian
  // coincide with it (conformality).
  double conformal_factor(const BallPoint& x) const;
  double boundary_conformal_factor(const Vec& y) const;

  // Full (n+1)x(n+1) Jacobian matrix, analytic.
  Mat jacobian(const BallPoint& x) const;
  Mat boundary_jacobian(const Vec& y) const;

  const Mat& rotation() const { return rotation_; }
  const Vec& center() const { return center_; }
  int ambient_dim() const { return center_.size(); }

 private:
  Vec translate(const Vec& x) const;  // T_a(x), raw formula
  Mat translate_jacobian(const Vec& x) const;

  Mat rotation_;
  Vec center_;
};

class Rng;
// Haar-ish random orthogonal matrix (rotation or reflection).
Mat random_orthogonal(Rng& rng, int dim);
// Random group element with |center| <= max_center_norm.
MobiusTransform random_mobius(Rng& rng, int ambient_dim, double max_center_norm);

// A hyperbolic ball; its Euclidean image is the T_center-preimage of the
// Euclidean ball of radius tanh(radius/2) around the origin.
struct HyperbolicBall {
  BallPoint center;
  double radius;

  HyperbolicBall(const BallPoint& c, double r);
  bool contains(const BallPoint& x) const;  // strict
  double boundary_euclidean_radius() const { return euclidean_radius(radius); }
};

}  // namespace hypext
