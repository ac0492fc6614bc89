#include "hypext/geom.hpp"

#include <algorithm>

namespace hypext {

Mat outer(const Vec& a, const Vec& b) {
  Mat m(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

namespace {

// One cyclic Jacobi sweep family; n <= 3 converges in a handful of sweeps.
void jacobi_diagonalize(Mat& s) {
  const int n = s.rows();
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    if (off < 1e-30) return;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(s(p, q)) < 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
}

}  // namespace

std::array<double, kMaxDim> sym_eigen_values(const Mat& s) {
  Mat d = s;
  jacobi_diagonalize(d);
  std::array<double, kMaxDim> ev{};
  for (int i = 0; i < d.rows(); ++i) ev[i] = d(i, i);
  std::sort(ev.begin(), ev.begin() + d.rows(), std::greater<double>());
  return ev;
}

double sym_eigen_max(const Mat& s) { return sym_eigen_values(s)[0]; }

double operator_norm(const Mat& a) {
  // Largest eigenvalue of A^T A; the smaller Gram side keeps n at most 3.
  const Mat g = (a.rows() <= a.cols()) ? a * a.transpose() : a.transpose() * a;
  return std::sqrt(std::max(0.0, sym_eigen_max(g)));
}

std::array<double, kMaxDim> singular_values(const Mat& a) {
  const Mat g = (a.rows() <= a.cols()) ? a * a.transpose() : a.transpose() * a;
  auto ev = sym_eigen_values(g);
  std::array<double, kMaxDim> sv{};
  for (int i = 0; i < g.rows(); ++i) sv[i] = std::sqrt(std::max(0.0, ev[i]));
  return sv;
}

Mat inverse(const Mat& a) {
  assert(a.rows() == a.cols());
  const int n = a.rows();
  Mat inv(n, n);
  if (n == 1) {
    inv(0, 0) = 1.0 / a(0, 0);
    return inv;
  }
  if (n == 2) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (det == 0) throw std::invalid_argument("singular 2x2 matrix");
    inv(0, 0) = a(1, 1) / det;
    inv(0, 1) = -a(0, 1) / det;
    inv(1, 0) = -a(1, 0) / det;
    inv(1, 1) = a(0, 0) / det;
    return inv;
  }
  const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                     a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                     a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  if (det == 0) throw std::invalid_argument("singular 3x3 matrix");
  inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
  inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
  inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
  inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
  inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
  inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
  inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
  inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
  inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
  return inv;
}

Mat polar_rotation(const Mat& a) {
  assert(a.rows() == a.cols());
  Mat x = a;
  for (int it = 0; it < 64; ++it) {
    const Mat xit = inverse(x).transpose();
    Mat next = x;
    next += xit;
    next *= 0.5;
    Mat diff = next;
    diff -= x;
    x = next;
    if (diff.max_abs() < 1e-15) break;
  }
  return x;
}

}  // namespace hypext
