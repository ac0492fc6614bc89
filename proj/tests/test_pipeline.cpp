#include <doctest.h>

#include <cmath>

#include "hypext/pipeline.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"
#include "test_helpers.hpp"

using namespace hypext;

namespace {

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.iota = 0.9;
  cfg.seed = 42;
  cfg.c1_seed = 0.05;
  cfg.sup_samples = 128;
  cfg.radius_candidates = 32;
  cfg.boundary_quad_samples = 64;
  cfg.mc_energy_samples = 10000;
  cfg.mc_ball_samples = 1024;
  cfg.mc_stage_samples = 1024;
  cfg.mc_distribution_samples = 20000;
  cfg.good_fraction_samples = 128;
  cfg.trace_points = 8;
  return cfg;
}

SphereMap corpus_map(const char* desc, int res = 256) {
  return make_test_map(MapDescriptor::parse(desc), SphereGrid::circle(res));
}

}  // namespace

TEST_CASE("constant maps take the fast path") {
  const ExtensionResult res = extend(corpus_map("constant:0.6,0.8"), small_config());
  CHECK(res.ledger.fast_path);
  CHECK(res.singularities.points.empty());
  for (const auto& s : res.distribution) CHECK(s.value == 0.0);
  // U is identically the constant
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const BallPoint x(rng.ball_point(2, 0.99));
    CHECK((res.field.evaluate(x) - Vec{0.6, 0.8}).norm() < 1e-13);
  }
  const AuditReport audit = audit_estimates(res, small_config());
  CHECK(audit.all_pass());
}

TEST_CASE("degree-1 run exercises the full path end to end") {
  const PipelineConfig cfg = small_config();
  const SphereMap u = corpus_map("degree:1");
  const ExtensionResult res = extend(u, cfg);
  CHECK(!res.ledger.fast_path);
  CHECK(res.ledger.fast_path_bound ==
        doctest::Approx(4.0).epsilon(2e-2));  // (4^2 E / |S^1|^2)^{1/2}
  CHECK(res.ledger.q_achieved > 0);
  CHECK(res.ledger.rho == doctest::Approx(res.ledger.rho_formula *
                                          std::pow(2.0, res.ledger.rho_doublings)));
  CHECK(res.trace.pass);
  CHECK(res.good_fraction_monotone);
  for (const auto& rep : res.improvements) CHECK(rep.all_pass());
  const AuditReport audit = audit_estimates(res, cfg);
  CHECK(audit.all_pass());

  // the output is circle-valued away from the singular centers
  Rng rng(5);
  int tested = 0;
  for (int i = 0; i < 2000 && tested < 500; ++i) {
    const BallPoint x(rng.ball_point(2, 0.995));
    bool near = false;
    for (const auto& b : res.singularities.points)
      if (hyperbolic_distance(b, x) < 1e-6) near = true;
    if (near) continue;
    ++tested;
    CHECK(res.field.target().distance_to(res.field.evaluate(x)) <
          cfg.iota * 1e-3);
  }
  CHECK(tested == 500);

  // distribution: finite, sup attained inside the grid
  double sup = 0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < res.distribution.size(); ++i)
    if (res.distribution[i].value > sup) {
      sup = res.distribution[i].value;
      argmax = i;
    }
  CHECK(sup > 0);
  CHECK(sup == res.ledger.quasinorm_sup);
  CHECK(argmax > 0);
  for (const auto& s : res.distribution) {
    CHECK(std::isfinite(s.value));
    CHECK(std::isfinite(s.std_error));
  }
}

TEST_CASE("identical configs reproduce identical results") {
  const PipelineConfig cfg = small_config();
  const SphereMap u = corpus_map("degree:1");
  const ExtensionResult a = extend(u, cfg);
  const ExtensionResult b = extend(u, cfg);
  CHECK(a.ledger.rho == b.ledger.rho);
  CHECK(a.ledger.quasinorm_sup == b.ledger.quasinorm_sup);
  CHECK(a.ledger.e_hyperbolic == b.ledger.e_hyperbolic);
  REQUIRE(a.singularities.points.size() == b.singularities.points.size());
  for (std::size_t i = 0; i < a.singularities.points.size(); ++i)
    CHECK((a.singularities.points[i].coords() -
           b.singularities.points[i].coords())
              .norm() == 0.0);
  REQUIRE(a.distribution.size() == b.distribution.size());
  for (std::size_t i = 0; i < a.distribution.size(); ++i)
    CHECK(a.distribution[i].value == b.distribution[i].value);
}

TEST_CASE("w1n front end records its own scale formula") {
  PipelineConfig cfg = small_config();
  cfg.mode = "w1n";
  cfg.cw_seed = 0.0125;
  const ExtensionResult res = extend_w1n(corpus_map("degree:1"), cfg);
  CHECK(res.ledger.mode == "w1n");
  CHECK(res.ledger.w1n == doctest::Approx(2 * M_PI).epsilon(1e-10));
  CHECK(res.ledger.rho_formula ==
        doctest::Approx(0.5 * (8 * 0.0125 / 0.9) * 2 * M_PI).epsilon(1e-12));
  const AuditReport audit = audit_estimates(res, cfg);
  CHECK(audit.all_pass());

  // maps without derivative information are rejected
  CHECK_THROWS_AS(extend_w1n(values_only(corpus_map("degree:1")), cfg),
                  std::invalid_argument);
}

TEST_CASE("iota validation") {
  PipelineConfig cfg = small_config();
  cfg.iota = 2.0;  // beyond the circle retraction tube
  CHECK_THROWS_AS(extend(corpus_map("degree:1"), cfg), std::invalid_argument);
  cfg.iota = 1e-4;  // below the node-scale oscillation
  CHECK_THROWS_AS(extend(corpus_map("degree:1"), cfg), std::invalid_argument);
}

TEST_CASE("distribution of a pure radial singularity matches the euclidean bound") {
  // u o pi_{0,rho}: the euclidean distribution plateau of the degree-1 data
  // is pi R^2 (sharp in the euclidean counterpart of the weak-type lemma)
  auto f = std::make_shared<HyperharmonicField>(corpus_map("degree:1", 512));
  const double rho = 1.0, re = euclidean_radius(rho);
  const CompositeField v = CompositeField(f, ManifoldTarget::circle())
                               .with_redirect(HyperbolicBall(BallPoint::origin(2), rho), 1);
  const auto dist = distribution_function(v, log_lambda_grid(2.0, 20.0, 7),
                                          200000, 11);
  for (const auto& s : dist)
    CHECK(s.value ==
          doctest::Approx(M_PI * re * re).epsilon(0.08));
}

TEST_CASE("doubling the MC sample count shrinks errors by sqrt(2)") {
  auto f = std::make_shared<HyperharmonicField>(corpus_map("degree:1", 256));
  const CompositeField v = CompositeField(f, ManifoldTarget::circle())
                               .with_redirect(HyperbolicBall(BallPoint::origin(2), 1.0), 1);
  const std::vector<double> grid = {3.0};
  const auto d1 = distribution_function(v, grid, 20000, 11);
  const auto d2 = distribution_function(v, grid, 40000, 11);
  CHECK(d1[0].std_error / d2[0].std_error ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
}

TEST_CASE("frozen closing-asymptotics constants re-derive from the formulas") {
  for (int n = 1; n <= 2; ++n) {
    const FrozenConstants fc = frozen_constants(n);
    for (double rho = 0.1; rho <= 8.0; rho += 0.037) {
      const double i05 = sinh_power_integral(n, 0.5 * rho);
      const double q_bound =
          sinh_power_integral(n, 4.5 * rho) / i05;
      CHECK(q_bound <= fc.c3_q * std::exp(4.0 * n * rho));
      const double delta =
          std::min(rho * i05 / (4.0 * sinh_power_integral(n, 2.5 * rho)),
                   0.5 * rho);
      CHECK(delta >= fc.c4_delta * rho * std::exp(-3.0 * n * rho));
      const double eta = 4.0 * std::sinh(2 * rho) / rho;
      CHECK(eta <= fc.c5_eta * std::exp(2 * rho) / rho);
      const double kappa =
          1.0 + eta * std::log(std::tanh(rho) / std::tanh(0.5 * delta));
      CHECK(kappa <= fc.c6_kappa * std::exp(5 * rho) / (rho * rho));
    }
  }
}

TEST_CASE("concentrated bubble: covering built, improvement grows the good set") {
  // one covering + one improvement at the center nearest the concentration,
  // sampled good-set growth inside B_rho(a)
  const SphereMap u = corpus_map("bubble:1;0.9,0", 512);
  auto f = std::make_shared<HyperharmonicField>(u);
  const double iota_eff = 0.9 - u.node_oscillation();
  const double rho_bar = enclosing_bad_radius(*f, iota_eff, 0.1, 2.0, 192, 3);
  CHECK(rho_bar > 2.0);  // the bad set sits out at ~ 2 atanh(0.9)

  const double rho = 2.0;
  const HyperbolicCovering cov = build_covering(2, rho_bar + rho, rho, 3);
  CHECK(cov.coverage_verified);
  CHECK(cov.centers.size() > 1);

  // the blob center in the ball: concentration at a/|a| with |a| = 0.9
  const BallPoint blob(Vec{0.9, 0});
  int nearest = 0;
  for (int i = 1; i < static_cast<int>(cov.centers.size()); ++i)
    if (hyperbolic_distance(cov.centers[i], blob) <
        hyperbolic_distance(cov.centers[nearest], blob))
      nearest = i;

  const CompositeField base(f, ManifoldTarget::circle());
  SingularitySet s;
  s.delta = 0.05;
  ImproveParams params;
  params.radius_candidates = 32;
  params.sphere_samples = 192;
  params.mc_samples = 1024;
  params.certified_good_radius = rho_bar;
  const ImproveResult res = improve_on_ball(
      base, cov.centers[nearest], rho, 0.05, s, iota_eff, params, 1, 5);
  CHECK(res.report.all_pass());

  const MobiusTransform back =
      MobiusTransform::translation(cov.centers[nearest]).inverse();
  Rng rng(7);
  int before_good = 0, after_good = 0;
  for (int i = 0; i < 200; ++i) {
    const BallPoint x =
        back.apply(BallPoint(rng.ball_point(2, euclidean_radius(rho))));
    if (base.target().distance_to(base.evaluate(x)) < iota_eff) ++before_good;
    if (res.field.target().distance_to(res.field.evaluate(x)) < iota_eff)
      ++after_good;
  }
  CHECK(after_good == 200);        // the whole ball is now in the tube
  CHECK(before_good < 200);        // it was not before
}
