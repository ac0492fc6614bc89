#include "hypext/hyperbolic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"

namespace hypext {

BallPoint::BallPoint(const Vec& x) : x_(x) {
  if (x.size() < 2 || x.size() > kMaxDim)
    throw std::invalid_argument("BallPoint: ambient dimension must be 2 or 3");
  if (x.norm() >= 1.0 - kInteriorMargin)
    throw std::invalid_argument("BallPoint: |x| = " + std::to_string(x.norm()) +
                                " is outside the usable interior of the ball");
}

BallPoint BallPoint::origin(int ambient_dim) {
  return BallPoint(Vec(ambient_dim));
}

double sphere_area(int n) {
  if (n == 1) return 2.0 * std::numbers::pi;
  if (n == 2) return 4.0 * std::numbers::pi;
  throw std::invalid_argument("sphere_area: only n in {1,2} is supported");
}

double hyperbolic_distance(const BallPoint& x, const BallPoint& y) {
  const double q2 = (x.coords() - y.coords()).norm2();
  const double t =
      q2 / ((1.0 - x.norm2()) * (1.0 - y.norm2()));
  // acosh(1 + 2t) = log1p(2t + 2 sqrt(t (t + 1)))
  return std::log1p(2.0 * t + 2.0 * std::sqrt(t * (t + 1.0)));
}

double hyperbolic_ball_volume(int n, double radius) {
  if (radius <= 0) throw std::invalid_argument("ball volume: radius must be positive");
  return sphere_area(n) * sinh_power_integral(n, radius);
}

double hyperbolic_measure_density(int n, const BallPoint& x) {
  return std::pow(2.0 / (1.0 - x.norm2()), n + 1);
}

double dual_norm_factor(const BallPoint& x) {
  return 0.5 * (1.0 - x.norm2());
}

double hyperbolic_uniform_radius(double u, int n, double max_radius) {
  const double total = sinh_power_integral(n, max_radius);
  double lo = 0, hi = max_radius;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sinh_power_integral(n, mid) <= u * total) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

MobiusTransform::MobiusTransform(const Mat& rotation, const BallPoint& center)
    : rotation_(rotation), center_(center.coords()) {
  const int d = center.ambient_dim();
  if (rotation.rows() != d || rotation.cols() != d)
    throw std::invalid_argument("MobiusTransform: rotation size mismatch");
  Mat gram = rotation.transpose() * rotation;
  gram -= Mat::identity(d);
  if (gram.max_abs() > 1e-12)
    throw std::invalid_argument("MobiusTransform: rotation is not orthogonal");
}

MobiusTransform MobiusTransform::identity(int ambient_dim) {
  return MobiusTransform(Mat::identity(ambient_dim),
                         BallPoint::origin(ambient_dim));
}

MobiusTransform MobiusTransform::translation(const BallPoint& a) {
  return MobiusTransform(Mat::identity(a.ambient_dim()), a);
}

Vec MobiusTransform::translate(const Vec& x) const {
  const Vec& a = center_;
  const double a2 = a.norm2();
  const double x2 = x.norm2();
  const Vec xa = x - a;
  const double denom = 1.0 + x2 * a2 - 2.0 * x.dot(a);
  return (1.0 / denom) * ((1.0 - a2) * xa - xa.norm2() * a);
}

BallPoint MobiusTransform::apply(const BallPoint& x) const {
  return BallPoint(rotation_.apply(translate(x.coords())));
}

Vec MobiusTransform::apply_boundary(const Vec& y) const {
  // On |y| = 1 the denominator reduces to |y - a|^2. The pure-rotation case
  // is kept exact so that composing with the identity is bit-transparent.
  const Vec& a = center_;
  if (a.norm2() == 0.0) return rotation_.apply(y);
  const Vec ya = y - a;
  const double denom = ya.norm2();
  const Vec t = (1.0 / denom) * ((1.0 - a.norm2()) * ya - denom * a);
  return rotation_.apply(t);
}

MobiusTransform MobiusTransform::inverse() const {
  // T = R o T_a, so T^{-1} = T_a^{-1} o R^T = T_{-a} o R^T = R^T o T_{-Ra}
  // using that rotations conjugate translations: R T_b R^T = T_{Rb}.
  Vec ra = rotation_.apply(center_);
  ra *= -1.0;
  return MobiusTransform(rotation_.transpose(), BallPoint(ra));
}

MobiusTransform MobiusTransform::compose_after(
    const MobiusTransform& inner) const {
  const int d = ambient_dim();
  // center: the unique a with (this o inner)(a) = 0
  const BallPoint a =
      inner.inverse().apply(this->inverse().apply(BallPoint::origin(d)));
  const MobiusTransform ta = translation(a);
  const MobiusTransform ta_inv = ta.inverse();
  // residual S = this o inner o T_a^{-1} fixes 0, hence is orthogonal;
  // sample it on a frame and take the polar factor
  Mat frame(d, d);
  const double h = 0.25;
  for (int j = 0; j < d; ++j) {
    Vec ep(d), em(d);
    ep[j] = h;
    em[j] = -h;
    const Vec sp =
        this->apply(inner.apply(ta_inv.apply(BallPoint(ep)))).coords();
    const Vec sm =
        this->apply(inner.apply(ta_inv.apply(BallPoint(em)))).coords();
    for (int i = 0; i < d; ++i) frame(i, j) = (sp[i] - sm[i]) / (2.0 * h);
  }
  return MobiusTransform(polar_rotation(frame), a);
}

double MobiusTransform::conformal_factor(const BallPoint& x) const {
  // (1-|T_a x|^2)/(1-|x|^2) = (1-|a|^2)/D(x), exact and cancellation-free
  const Vec& a = center_;
  const double denom =
      1.0 + x.norm2() * a.norm2() - 2.0 * x.coords().dot(a);
  return (1.0 - a.norm2()) / denom;
}

double MobiusTransform::boundary_conformal_factor(const Vec& y) const {
  return (1.0 - center_.norm2()) / (y - center_).norm2();
}

Mat MobiusTransform::translate_jacobian(const Vec& x) const {
  const Vec& a = center_;
  const int d = x.size();
  const double a2 = a.norm2();
  const Vec xa = x - a;
  const double denom = 1.0 + x.norm2() * a2 - 2.0 * x.dot(a);
  const Vec num = (1.0 - a2) * xa - xa.norm2() * a;

  // D num = (1-|a|^2) I - 2 a (x-a)^T,  grad denom = 2|a|^2 x - 2a
  Mat dnum = Mat::identity(d);
  dnum *= (1.0 - a2);
  dnum -= 2.0 * outer(a, xa);
  const Vec gden = 2.0 * (a2 * x - a);

  Mat j = dnum;
  j *= (1.0 / denom);
  j -= (1.0 / (denom * denom)) * outer(num, gden);
  return j;
}

Mat MobiusTransform::jacobian(const BallPoint& x) const {
  return rotation_ * translate_jacobian(x.coords());
}

Mat MobiusTransform::boundary_jacobian(const Vec& y) const {
  return rotation_ * translate_jacobian(y);
}

Mat random_orthogonal(Rng& rng, int dim) {
  // Gram-Schmidt on gaussian columns, occasionally flipping to a reflection
  Mat m(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    for (int k = 0; k < j; ++k) {
      Vec col(dim);
      for (int i = 0; i < dim; ++i) col[i] = m(i, k);
      v -= v.dot(col) * col;
    }
    v = v.normalized();
    for (int i = 0; i < dim; ++i) m(i, j) = v[i];
  }
  if (rng.uniform01() < 0.5)
    for (int i = 0; i < dim; ++i) m(i, 0) = -m(i, 0);
  return m;
}

MobiusTransform random_mobius(Rng& rng, int ambient_dim, double max_center_norm) {
  const Vec a = (max_center_norm * std::cbrt(rng.uniform01())) *
                rng.unit_vector(ambient_dim);
  return MobiusTransform(random_orthogonal(rng, ambient_dim), BallPoint(a));
}

HyperbolicBall::HyperbolicBall(const BallPoint& c, double r)
    : center(c), radius(r) {
  if (r <= 0) throw std::invalid_argument("HyperbolicBall: radius must be positive");
}

bool HyperbolicBall::contains(const BallPoint& x) const {
  return hyperbolic_distance(center, x) < radius;
}

}  // namespace hypext
