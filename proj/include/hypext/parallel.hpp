#pragma once

#include <cstddef>
#include <vector>

namespace hypext::par {

// Serial reference kernels and their OpenMP counterparts. The parallel
// variants evaluate the per-index term into a buffer and reduce in index
// order, so serial and parallel results are bit-identical regardless of
// thread count; the test suite asserts exact equality and the benchmark
// target compares their wall times.

inline bool& parallel_enabled() {
  static bool enabled = true;
  return enabled;
}

template <class F>
double sum_index_serial(std::size_t n, F&& f) {
  double sum = 0.0, comp = 0.0;  // Kahan
  for (std::size_t i = 0; i < n; ++i) {
    const double y = f(i) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <class F>
double sum_index_parallel(std::size_t n, F&& f) {
  std::vector<double> buf(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    buf[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = buf[i] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <class F>
double sum_index(std::size_t n, F&& f) {
  return parallel_enabled() ? sum_index_parallel(n, f) : sum_index_serial(n, f);
}

template <class F>
double max_index_serial(std::size_t n, F&& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, f(i));
  return m;
}

template <class F>
double max_index_parallel(std::size_t n, F&& f) {
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    m = std::max(m, f(static_cast<std::size_t>(i)));
  return m;
}

template <class F>
double max_index(std::size_t n, F&& f) {
  return parallel_enabled() ? max_index_parallel(n, f) : max_index_serial(n, f);
}

// Fills out[i] = f(i); used for batch field evaluation and MC sample maps.
template <class T, class F>
void map_index(std::size_t n, std::vector<T>& out, F&& f) {
  out.resize(n);
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  }
}

}  // namespace hypext::par
