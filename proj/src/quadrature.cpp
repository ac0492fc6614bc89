#include "hypext/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypext {

GaussLegendre gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m must be positive");
  GaussLegendre gl;
  gl.nodes.resize(m);
  gl.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_m
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    gl.nodes[i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return gl;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double sinh_power_integral(int n, double t) {
  if (t <= 0) return 0.0;
  if (n == 1) return std::cosh(t) - 1.0;
  if (n == 2) return 0.25 * std::sinh(2.0 * t) - 0.5 * t;
  return adaptive_simpson(
      [n](double r) { return std::pow(std::sinh(r), n); }, 0.0, t,
      1e-13 * std::max(1.0, std::pow(std::sinh(t), n) * t));
}

}  // namespace hypext
