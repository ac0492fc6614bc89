#include <doctest.h>

#include <cmath>

#include "hypext/extension.hpp"
#include "hypext/rng.hpp"
#include "test_helpers.hpp"

using namespace hypext;
using hypext::testing::random_interior;

namespace {

HyperharmonicField field_of(const char* desc, int res) {
  const MapDescriptor d = MapDescriptor::parse(desc);
  return HyperharmonicField(make_test_map(
      d, d.boundary_dim() == 1 ? SphereGrid::circle(res)
                               : SphereGrid::sphere(res, 2 * res)));
}

}  // namespace

TEST_CASE("constant boundary data extends to the constant") {
  const HyperharmonicField f = field_of("constant:0.6,0.8", 128);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const BallPoint x = random_interior(rng, 2, 0.9985);
    CHECK((f.evaluate(x) - Vec{0.6, 0.8}).norm() < 1e-14);
    CHECK(f.derivative(x).max_abs() < 1e-10);
  }
}

TEST_CASE("value at the origin is the boundary mean") {
  const HyperharmonicField f = field_of("degree:2", 256);
  const SphereMap& u = f.boundary();
  Vec mean(2);
  double wsum = 0;
  for (int i = 0; i < u.grid.size(); ++i) {
    mean += u.grid.weights[i] * u.values[i];
    wsum += u.grid.weights[i];
  }
  mean *= 1.0 / wsum;
  CHECK((f.evaluate(BallPoint::origin(2)) - mean).norm() < 1e-13);
}

TEST_CASE("closed form for circle modes") {
  // Hu(r e^{i th}) = r^k (cos k th, sin k th); same closed form for the
  // derivative: |D Hu| = k r^{k-1}
  Rng rng(5);
  for (int k = 1; k <= 3; ++k) {
    const HyperharmonicField f =
        field_of(("degree:" + std::to_string(k)).c_str(), 512);
    for (int i = 0; i < 40; ++i) {
      const double r = rng.uniform(0.05, 0.95);
      const double th = rng.uniform(0, 2 * M_PI);
      const BallPoint x(Vec{r * std::cos(th), r * std::sin(th)});
      const Vec expected{std::pow(r, k) * std::cos(k * th),
                         std::pow(r, k) * std::sin(k * th)};
      CHECK((f.evaluate(x) - expected).norm() < 1e-7);
      CHECK(operator_norm(f.derivative(x)) ==
            doctest::Approx(k * std::pow(r, k - 1)).epsilon(1e-6));
    }
  }
}

TEST_CASE("analytic derivative agrees with finite differences") {
  for (const char* desc : {"degree:2", "sphere-degree:1"}) {
    const HyperharmonicField f = field_of(desc, desc[0] == 'd' ? 256 : 24);
    const int dim = f.ambient_dim();
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      const BallPoint x = random_interior(rng, dim, 0.9);
      const Mat a = f.derivative(x);
      const Mat fd = testing::fd_jacobian(
          [&](const BallPoint& p) { return f.evaluate(p); }, x, 1e-6);
      Mat diff = a;
      diff -= fd;
      CHECK(diff.max_abs() < std::max(1e-6, 1e-4 * a.max_abs()));
    }
  }
}

TEST_CASE("kernel mass and the hull property") {
  const HyperharmonicField f = field_of("degree:1", 512);
  Rng rng(11);
  for (int i = 0; i < 60; ++i) {
    const BallPoint x = random_interior(rng, 2, 0.99);
    CHECK(std::fabs(f.kernel_mass(x) - 1.0) < 1e-6);
    // each component stays within the boundary range (probability kernel)
    const Vec v = f.evaluate(x);
    for (int c = 0; c < 2; ++c) CHECK(std::fabs(v[c]) <= 1.0 + 1e-12);
  }
}

TEST_CASE("uniform distance bound with the explicit constant") {
  // dist(Hu(x), u-range) <= (4^{2n} E / |S^n|^2)^{1/(n+1)}
  for (const char* desc : {"degree:1", "bubble:1;0.7,0"}) {
    const HyperharmonicField f = field_of(desc, 512);
    const double bound = std::pow(
        std::pow(4.0, 2) * gagliardo_seminorm(f.boundary()).value /
            (sphere_area(1) * sphere_area(1)),
        0.5);
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
      const BallPoint x = random_interior(rng, 2, 0.999);
      CHECK(f.boundary().distance_to_range(f.evaluate(x)) <= bound);
    }
  }
}

TEST_CASE("covariance under the group") {
  const HyperharmonicField f = field_of("degree:1", 512);
  Rng rng(17);
  std::vector<BallPoint> sample;
  for (int i = 0; i < 30; ++i) sample.push_back(random_interior(rng, 2, 0.7));

  CHECK(f.covariance_defect(MobiusTransform::identity(2), sample) == 0.0);
  for (int i = 0; i < 3; ++i)
    CHECK(f.covariance_defect(random_mobius(rng, 2, 0.5), sample) < 1e-4);

  // defect decreases under refinement when boundary values are interpolated
  const MobiusTransform t = random_mobius(rng, 2, 0.5);
  double prev = 1e9;
  for (int m : {128, 256, 512}) {
    const HyperharmonicField g(values_only(
        make_test_map(MapDescriptor::parse("degree:1"), SphereGrid::circle(m))));
    const double defect = g.covariance_defect(t, sample);
    CHECK(defect < prev);
    prev = defect;
  }
}

TEST_CASE("hyperbolic energy") {
  const HyperharmonicField c = field_of("constant:1,0", 128);
  CHECK(c.hyperbolic_energy(10000, 3, 8.0) == 0.0);

  // degree-k: the extension is z^k, the conformally invariant energy over
  // the full disk is pi k; check against the MC estimate with its error
  for (int k = 1; k <= 2; ++k) {
    const HyperharmonicField f =
        field_of(("degree:" + std::to_string(k)).c_str(), 512);
    double se = 0;
    const double e = f.hyperbolic_energy(40000, 5, 14.0, &se);
    CHECK(std::fabs(e - M_PI * k) < std::max(4 * se, 2e-3 * k));
  }

  // bounded by the seminorm with a finite empirical constant
  const char* corpus[3] = {"degree:1", "degree:3", "bubble:1;0.5,0"};
  for (const char* desc : corpus) {
    const HyperharmonicField f = field_of(desc, 512);
    const double ratio = f.hyperbolic_energy(20000, 5, 12.0) /
                         gagliardo_seminorm(f.boundary()).value;
    CHECK(ratio > 0);
    CHECK(ratio < 1.0);  // observed corpus constant is ~1/(4 pi)
  }
}

TEST_CASE("energy is invariant under pullback") {
  const HyperharmonicField f = field_of("degree:1", 512);
  Rng rng(19);
  const MobiusTransform t = random_mobius(rng, 2, 0.5);
  const HyperharmonicField g(compose_with_mobius(f.boundary(), t));
  double se_f = 0, se_g = 0;
  const double ef = f.hyperbolic_energy(40000, 7, 12.0, &se_f);
  const double eg = g.hyperbolic_energy(40000, 9, 12.0, &se_g);
  CHECK(std::fabs(ef - eg) < 3 * (se_f + se_g) + 2e-3);
}

TEST_CASE("nontangential convergence") {
  const HyperharmonicField c = field_of("constant:0.6,0.8", 128);
  const NontangentialReport crep = c.nontangential_check(Vec{1, 0}, 1.0);
  for (double dev : crep.deviations) CHECK(dev < 1e-13);

  // radial approach for the degree-1 mode: deviation is exactly 1 - r,
  // halving at each step
  const HyperharmonicField f = field_of("degree:1", 512);
  const NontangentialReport rep = f.nontangential_check(Vec{0, 1}, 1e-12, 4, 11);
  for (std::size_t i = 0; i + 1 < rep.deviations.size(); ++i) {
    CHECK(rep.deviations[i] ==
          doctest::Approx(1.0 - rep.radii[i]).epsilon(1e-3));
    CHECK(rep.deviations[i + 1] / rep.deviations[i] ==
          doctest::Approx(0.5).epsilon(1e-2));
  }
  CHECK(rep.tail_decreasing());
  // the full approach keeps converging past the quadrature-limited rungs
  const NontangentialReport deep = f.nontangential_check(Vec{0, 1}, 1e-12);
  CHECK(deep.final_deviation() < 5e-4);

  // approach at the concentration point of a bubble still converges
  const HyperharmonicField b = field_of("bubble:1;0.9,0", 512);
  const NontangentialReport brep = b.nontangential_check(Vec{1, 0}, 0.5);
  CHECK(brep.tail_decreasing(8, 1.05));
  CHECK(brep.final_deviation() < brep.deviations.front());
}

TEST_CASE("near-boundary evaluation is rejected with a pointer to the alternative") {
  const HyperharmonicField f = field_of("degree:1", 128);
  try {
    f.evaluate(BallPoint(Vec{1.0 - 5e-7, 0}));
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("nontangential") != std::string::npos);
  }
}

TEST_CASE("energy precondition") {
  const HyperharmonicField f = field_of("degree:1", 128);
  CHECK_THROWS_AS(f.hyperbolic_energy(100, 3, 8.0), std::invalid_argument);
}
