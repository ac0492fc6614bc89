#include <doctest.h>

#include <cmath>

#include "hypext/pipeline.hpp"
#include "hypext/radial.hpp"
#include "hypext/scanner.hpp"
#include "test_helpers.hpp"

using namespace hypext;
using hypext::testing::random_interior;

namespace {

CompositeField base_field(const char* desc, int res = 512) {
  auto f = std::make_shared<HyperharmonicField>(
      make_test_map(MapDescriptor::parse(desc), SphereGrid::circle(res)));
  return CompositeField(f, ManifoldTarget::circle());
}

}  // namespace

TEST_CASE("pass-through outside redirect balls is exact") {
  const CompositeField u = base_field("degree:1");
  const CompositeField v = u.with_redirect(
      HyperbolicBall(BallPoint(Vec{0.2, 0.1}), 0.8), 1);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const BallPoint x = random_interior(rng, 2, 0.95);
    if (hyperbolic_distance(x, BallPoint(Vec{0.2, 0.1})) <= 0.8) continue;
    CHECK((v.evaluate(x) - u.evaluate(x)).norm() == 0.0);
  }
}

TEST_CASE("centered redirect evaluates the base on the boundary sphere") {
  const CompositeField u = base_field("degree:2");
  const double rho_star = 1.0;
  const CompositeField v =
      u.with_redirect(HyperbolicBall(BallPoint::origin(2), rho_star), 1);
  const double re = euclidean_radius(rho_star);
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const BallPoint x = random_interior(rng, 2, 0.9 * re);
    const Vec projected = (re / x.norm()) * x.coords();
    CHECK((v.evaluate(x) - u.evaluate(BallPoint(projected))).norm() == 0.0);
  }
  CHECK_THROWS_AS(v.evaluate(BallPoint::origin(2)), std::domain_error);
}

TEST_CASE("nested redirects follow the staged composition, hand-traced") {
  // stage-2 ball around b; its projection of x lands inside the stage-1
  // ball around the origin and must be redirected again
  const CompositeField u = base_field("degree:1");
  const BallPoint b(Vec{0.3, 0});
  const double r1 = 1.2, r2 = 0.6;
  const CompositeField v =
      u.with_redirect(HyperbolicBall(BallPoint::origin(2), r1), 1)
          .with_redirect(HyperbolicBall(b, r2), 2);

  const BallPoint x(Vec{0.32, 0.01});
  REQUIRE(hyperbolic_distance(x, b) < r2);

  // hand trace: translate b to 0, project to the euclidean sphere
  // tanh(r2/2), translate back; then (still inside the stage-1 ball)
  // project radially to tanh(r1/2)
  const MobiusTransform tb = MobiusTransform::translation(b);
  Vec z = tb.apply(x).coords();
  z *= euclidean_radius(r2) / z.norm();
  Vec y = tb.inverse().apply(BallPoint(z)).coords();
  REQUIRE(hyperbolic_distance(BallPoint(y), BallPoint::origin(2)) < r1);
  y *= euclidean_radius(r1) / y.norm();
  CHECK((v.evaluate(x) - u.evaluate(BallPoint(y))).norm() < 1e-15);
}

TEST_CASE("jacobian of redirected fields") {
  // single centered redirect over a degree-k boundary: |DV| at radius s is
  // (R/s) times the tangential derivative k R^{k-1} of the closed form
  const int k = 2;
  const CompositeField u = base_field("degree:2");
  const double rho_star = 1.0;
  const double re = euclidean_radius(rho_star);
  const CompositeField v =
      u.with_redirect(HyperbolicBall(BallPoint::origin(2), rho_star), 1);
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const double s = rng.uniform(0.1, 0.9) * re;
    const double th = rng.uniform(0, 2 * M_PI);
    const BallPoint x(Vec{s * std::cos(th), s * std::sin(th)});
    CHECK(operator_norm(v.jacobian(x)) ==
          doctest::Approx((re / s) * k * std::pow(re, k - 1)).epsilon(1e-6));
  }

  // constant data: zero derivative everywhere off the center
  const CompositeField c = base_field("constant:1,0", 128)
                               .with_redirect(HyperbolicBall(BallPoint::origin(2), 1.0), 1);
  CHECK(operator_norm(c.jacobian(BallPoint(Vec{0.2, 0.1}))) < 1e-10);
}

TEST_CASE("jacobian matches finite differences through redirect stacks") {
  const CompositeField v =
      base_field("degree:1")
          .with_redirect(HyperbolicBall(BallPoint(Vec{0.25, -0.1}), 0.9), 1)
          .with_redirect(HyperbolicBall(BallPoint(Vec{-0.3, 0.2}), 0.7), 2);
  Rng rng(11);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 200; ++i) {
    const BallPoint x = random_interior(rng, 2, 0.9);
    Mat a;
    try {
      a = v.jacobian(x);
    } catch (const std::exception&) {
      continue;  // boundary-sphere or center hits are excluded
    }
    const Mat fd = testing::fd_jacobian(
        [&](const BallPoint& p) { return v.evaluate(p); }, x, 1e-7);
    Mat diff = a;
    diff -= fd;
    if (diff.max_abs() >= std::max(1e-5, 1e-3 * a.max_abs())) {
      // reject points whose FD stencil straddles a redirect sphere
      bool near_sphere = false;
      for (const auto& r : v.redirects())
        if (std::fabs(hyperbolic_distance(r.ball.center, x) - r.ball.radius) <
            1e-5)
          near_sphere = true;
      if (!near_sphere) CHECK(diff.max_abs() < std::max(1e-5, 1e-3 * a.max_abs()));
      continue;
    }
    ++checked;
  }
  CHECK(checked >= 150);
}

TEST_CASE("continuity across the redirect sphere") {
  const CompositeField v =
      base_field("degree:1").with_redirect(
          HyperbolicBall(BallPoint::origin(2), 1.0), 1);
  const double re = euclidean_radius(1.0);
  Rng rng(13);
  for (int i = 0; i < 40; ++i) {
    const double th = rng.uniform(0, 2 * M_PI);
    const Vec dir{std::cos(th), std::sin(th)};
    const double eps = 1e-6 * dual_norm_factor(BallPoint(re * dir));
    const Vec inner = (re - eps) * dir;
    const Vec outer = (re + eps) * dir;
    const double jump =
        (v.evaluate(BallPoint(inner)) - v.evaluate(BallPoint(outer))).norm();
    const double smooth =
        3.0 * operator_norm(v.jacobian(BallPoint(outer))) * 2 * eps;
    CHECK(jump <= smooth + 1e-8);
  }
}

TEST_CASE("annulus energy identity") {
  const CompositeField u = base_field("degree:1");
  const AnnulusIdentity id = annulus_energy_identity_check(
      u, BallPoint::origin(2), 1.0, 0.25, 48, 256);
  CHECK(id.ratio() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(id.factor == doctest::Approx(std::sinh(1.0) *
                                     std::log(std::tanh(0.5) / std::tanh(0.125)))
                         .epsilon(1e-12));
  // trivial data
  const CompositeField c = base_field("constant:1,0", 128);
  const AnnulusIdentity idc = annulus_energy_identity_check(
      c, BallPoint::origin(2), 1.0, 0.25, 24, 128);
  CHECK(idc.lhs < 1e-12);
  CHECK(idc.rhs < 1e-12);
}

TEST_CASE("weak type bound with its explicit factor") {
  const CompositeField u = base_field("degree:1");
  const std::vector<double> lambdas = log_lambda_grid(1e-2, 1e2, 17);
  const WeakTypeCheck check = weak_type_check(u, BallPoint::origin(2), 1.0,
                                              lambdas, 20000, 256, 3);
  CHECK(check.holds(3.0));
  // the bound is asymptotically sharp for this data: the curve approaches
  // pi R^2 = RHS from below
  const double re = euclidean_radius(1.0);
  CHECK(check.rhs == doctest::Approx(M_PI * re * re).epsilon(1e-3));
  double peak = 0;
  for (double v : check.lhs) peak = std::max(peak, v);
  CHECK(peak > 0.5 * check.rhs);
  CHECK(peak < 1.25 * check.rhs);
  // large-lambda tail stays bounded by the small-ball closed form
  CHECK(check.lhs.back() < 1.2 * M_PI * re * re);
}

TEST_CASE("improvement on a ball with no obstructions") {
  const CompositeField u = base_field("degree:1");
  SingularitySet s;
  s.delta = 0.05;
  ImproveParams params;
  params.radius_candidates = 32;
  params.sphere_samples = 128;
  params.mc_samples = 2048;
  const ImproveResult res = improve_on_ball(
      u, BallPoint::origin(2), 1.5, 0.05, s, 0.88, params, 1, 99);
  CHECK(res.report.admissible_candidates == 32);
  CHECK(res.report.bad_fraction == 0.0);
  CHECK(res.report.all_pass());
  CHECK(res.erased.empty());
  // the redirect fills B_rho(a) with tube values
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const BallPoint x(rng.ball_point(2, euclidean_radius(1.5)));
    CHECK(res.field.target().distance_to(res.field.evaluate(x)) < 0.88);
  }
}

TEST_CASE("improvement clears a bad blob") {
  // bubble concentrated at (1,0): with iota = 0.5 the bad set sits within
  // hyperbolic distance ~ 2 atanh(0.5) of the blob center
  const CompositeField u = base_field("bubble:1;0.7,0");
  const BallPoint blob(Vec{0.7, 0});
  SingularitySet s;
  s.delta = 0.02;
  ImproveParams params;
  params.radius_candidates = 32;
  params.sphere_samples = 192;
  params.mc_samples = 2048;
  const double iota_eff = 0.45;
  const double rho = 2.8;
  const ImproveResult res =
      improve_on_ball(u, blob, rho, 0.02, s, iota_eff, params, 1, 7);
  CHECK(res.report.all_pass());
  Rng rng(19);
  const MobiusTransform back = MobiusTransform::translation(blob).inverse();
  for (int i = 0; i < 100; ++i) {
    const BallPoint x = back.apply(BallPoint(rng.ball_point(2, euclidean_radius(rho))));
    CHECK(res.field.target().distance_to(res.field.evaluate(x)) < iota_eff);
  }
}

TEST_CASE("improvement respects surviving singularities and hypothesis checks") {
  const CompositeField u = base_field("degree:1");
  SingularitySet s;
  s.delta = 0.05;
  s.points = {BallPoint(Vec{0.05, 0.0}), BallPoint(Vec{-0.93, 0.1})};
  ImproveParams params;
  params.radius_candidates = 32;
  params.sphere_samples = 128;
  params.mc_samples = 2048;
  const ImproveResult res = improve_on_ball(
      u, BallPoint::origin(2), 1.5, 0.05, s, 0.88, params, 1, 3);
  // the near singularity is engulfed, the far one survives untouched
  CHECK(res.erased == std::vector<int>{0});
  CHECK(res.report.all_pass());

  // hypothesis violation: too many singularities within 3 rho
  SingularitySet crowd;
  crowd.delta = 0.3;
  for (int i = 0; i < 12; ++i)
    crowd.points.push_back(BallPoint(Vec{0.05 * (i + 1), 0}));
  CHECK_THROWS_AS(improve_on_ball(u, BallPoint::origin(2), 1.5, 0.3, crowd,
                                  0.88, params, 1, 3),
                  ImproveHypothesisError);
}

TEST_CASE("improvement commutes with translation") {
  // improving u at center a matches improving the pulled-back map at the
  // origin: the admissibility pattern and the chosen radius coincide up to
  // quadrature noise
  const BallPoint a(Vec{0.4, 0.1});
  const CompositeField u = base_field("degree:1");
  const MobiusTransform ta = MobiusTransform::translation(a);
  const CompositeField u_pulled = CompositeField(
      std::make_shared<HyperharmonicField>(
          compose_with_mobius(u.base().boundary(), ta.inverse())),
      ManifoldTarget::circle());
  SingularitySet s;
  s.delta = 0.05;
  ImproveParams params;
  params.radius_candidates = 16;
  params.sphere_samples = 128;
  params.run_conclusion_checks = false;
  const ImproveResult at_a =
      improve_on_ball(u, a, 1.5, 0.05, s, 0.88, params, 1, 11);
  const ImproveResult at_0 =
      improve_on_ball(u_pulled, BallPoint::origin(2), 1.5, 0.05, s, 0.88,
                      params, 1, 11);
  CHECK(std::fabs(at_a.report.rho_star - at_0.report.rho_star) <
        1.5 * 1.5 / 16 + 1e-12);
  CHECK(at_a.report.boundary_energy ==
        doctest::Approx(at_0.report.boundary_energy).epsilon(0.02));
}
