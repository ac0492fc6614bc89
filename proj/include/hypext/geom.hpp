#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace hypext {

// Everything in this project lives in ambient dimension 2 or 3
// (the ball B^{n+1} with n in {1,2} and targets embedded in R^2 or R^3),
// so vectors and matrices are fixed-capacity values on the stack.
inline constexpr int kMaxDim = 3;

class Vec {
 public:
  Vec() = default;
  explicit Vec(int n) : n_(n) { assert(n >= 0 && n <= kMaxDim); }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    assert(n_ <= kMaxDim);
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }

  int size() const { return n_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  Vec normalized() const {
    double r = norm();
    if (r == 0) throw std::invalid_argument("cannot normalize the zero vector");
    return (1.0 / r) * (*this);
  }
  double dist(const Vec& o) const { return (*this - o).norm(); }

 private:
  std::array<double, kMaxDim> v_{};
  int n_ = 0;
};

inline Vec zero_vec(int n) { return Vec(n); }

// Row-major small matrix; rows = output components, cols = input components.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols) {
    assert(rows <= kMaxDim && cols <= kMaxDim);
  }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  double operator()(int i, int j) const { return m_[i][j]; }
  double& operator()(int i, int j) { return m_[i][j]; }

  Vec apply(const Vec& x) const {
    assert(x.size() == c_);
    Vec y(r_);
    for (int i = 0; i < r_; ++i) {
      double s = 0;
      for (int j = 0; j < c_; ++j) s += m_[i][j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = m_[i][j];
    return t;
  }

  Mat operator*(const Mat& o) const {
    assert(c_ == o.r_);
    Mat p(r_, o.c_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < o.c_; ++j) {
        double s = 0;
        for (int k = 0; k < c_; ++k) s += m_[i][k] * o.m_[k][j];
        p(i, j) = s;
      }
    return p;
  }

  Mat& operator+=(const Mat& o) {
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m_[i][j] += o.m_[i][j];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m_[i][j] -= o.m_[i][j];
    return *this;
  }
  Mat& operator*=(double s) {
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m_[i][j] *= s;
    return *this;
  }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(double s, Mat a) { return a *= s; }

  double frobenius() const {
    double s = 0;
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) s += m_[i][j] * m_[i][j];
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0;
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) s = std::max(s, std::fabs(m_[i][j]));
    return s;
  }

 private:
  std::array<std::array<double, kMaxDim>, kMaxDim> m_{};
  int r_ = 0, c_ = 0;
};

// Outer product a b^T.
Mat outer(const Vec& a, const Vec& b);

// Largest eigenvalue of a symmetric matrix (cyclic Jacobi).
double sym_eigen_max(const Mat& s);

// All eigenvalues of a symmetric matrix, descending.
std::array<double, kMaxDim> sym_eigen_values(const Mat& s);

// Largest singular value.
double operator_norm(const Mat& a);

// Singular values, descending (zero-padded to kMaxDim).
std::array<double, kMaxDim> singular_values(const Mat& a);

// Inverse of a square matrix up to 3x3 (adjugate formula).
Mat inverse(const Mat& a);

// Nearest orthogonal matrix (polar factor, Newton iteration).
Mat polar_rotation(const Mat& a);

}  // namespace hypext
