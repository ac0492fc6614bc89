// Wall-time comparison of the serial reference kernels against their
// OpenMP counterparts on the project's hot loops.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "hypext/extension.hpp"
#include "hypext/parallel.hpp"
#include "hypext/rng.hpp"
#include "hypext/spheremap.hpp"

using namespace hypext;

namespace {

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  // Gagliardo double sum
  {
    const SphereMap u = make_test_map(MapDescriptor::parse("degree:2"),
                                      SphereGrid::circle(4096));
    const double cutoff = 1.5 * u.grid.max_neighbor_spacing();
    double vs = 0, vp = 0;
    const double ts = timed([&] { vs = gagliardo_seminorm_serial(u, cutoff).value; });
    par::parallel_enabled() = true;
    const double tp = timed([&] { vp = gagliardo_seminorm(u, cutoff).value; });
    report("gagliardo double sum", ts, tp);
    if (vs != vp) std::printf("  MISMATCH: serial %.17g parallel %.17g\n", vs, vp);
  }

  // batch field evaluation
  {
    const SphereMap u = make_test_map(MapDescriptor::parse("degree:2"),
                                      SphereGrid::circle(2048));
    const HyperharmonicField field(u);
    const std::uint64_t stream = substream(7, "bench");
    const std::size_t count = 20000;
    std::vector<double> out_s, out_p;
    auto body = [&](std::size_t i) {
      Rng rng = rng_at(stream, i);
      const BallPoint x(rng.ball_point(2, 0.95));
      return operator_norm(field.derivative(x));
    };
    par::parallel_enabled() = false;
    const double ts = timed([&] { par::map_index(count, out_s, body); });
    par::parallel_enabled() = true;
    const double tp = timed([&] { par::map_index(count, out_p, body); });
    report("field derivative batch", ts, tp);
    for (std::size_t i = 0; i < count; ++i)
      if (out_s[i] != out_p[i]) {
        std::printf("  MISMATCH at %zu\n", i);
        break;
      }
  }

  // MC energy
  {
    const SphereMap u = make_test_map(MapDescriptor::parse("degree:1"),
                                      SphereGrid::circle(1024));
    const HyperharmonicField field(u);
    double es = 0, ep = 0;
    par::parallel_enabled() = false;
    const double ts = timed([&] { es = field.hyperbolic_energy(40000, 11, 8.0); });
    par::parallel_enabled() = true;
    const double tp = timed([&] { ep = field.hyperbolic_energy(40000, 11, 8.0); });
    report("hyperbolic energy MC", ts, tp);
    if (es != ep) std::printf("  MISMATCH: %.17g vs %.17g\n", es, ep);
  }
  return 0;
}
