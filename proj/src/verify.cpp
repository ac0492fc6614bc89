#include "hypext/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "hypext/covering.hpp"
#include "hypext/pipeline.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/radial.hpp"
#include "hypext/rng.hpp"
#include "hypext/scanner.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Mat fd_jacobian(const MobiusTransform& t, const BallPoint& x, double h) {
  const int d = x.ambient_dim();
  Mat j(d, d);
  for (int c = 0; c < d; ++c) {
    Vec xp = x.coords(), xm = x.coords();
    xp[c] += h;
    xm[c] -= h;
    const Vec fp = t.apply(BallPoint(xp)).coords();
    const Vec fm = t.apply(BallPoint(xm)).coords();
    for (int r = 0; r < d; ++r) j(r, c) = (fp[r] - fm[r]) / (2 * h);
  }
  return j;
}

SphereMap reference_map(int n, const MapDescriptor& desc, int res) {
  return make_test_map(desc, n == 1 ? SphereGrid::circle(res)
                                    : SphereGrid::sphere(res, 2 * res));
}

}  // namespace

SuiteResult verify_mobius(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"mobius", {}, 0};
  for (int n = 1; n <= 2; ++n) {
    const int d = n + 1;
    Rng rng(substream(seed, n == 1 ? "mobius-1" : "mobius-2"));
    double iso = 0, conf = 0, diff = 0, closure = 0, inv = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const MobiusTransform t = random_mobius(rng, d, 0.8);
      const BallPoint x(0.9 * std::cbrt(rng.uniform01()) * rng.unit_vector(d));
      const BallPoint y(0.9 * std::cbrt(rng.uniform01()) * rng.unit_vector(d));

      iso = std::max(iso, std::fabs(hyperbolic_distance(t.apply(x), t.apply(y)) -
                                    hyperbolic_distance(x, y)));

      const Mat fd = fd_jacobian(t, x, 1e-6);
      const double factor = t.conformal_factor(x);
      const auto sv = singular_values(fd);
      for (int i = 0; i < d; ++i)
        conf = std::max(conf, std::fabs(sv[i] - factor) / factor);

      const double lhs = (t.apply(x).coords() - t.apply(y).coords()).norm2();
      const double rhs = t.conformal_factor(x) * t.conformal_factor(y) *
                         (x.coords() - y.coords()).norm2();
      diff = std::max(diff, std::fabs(lhs - rhs));

      const MobiusTransform s = random_mobius(rng, d, 0.6);
      const MobiusTransform st = s.compose_after(t);
      closure = std::max(
          closure,
          (st.apply(x).coords() - s.apply(t.apply(x)).coords()).norm());

      inv = std::max(
          inv, (t.inverse().apply(t.apply(x)).coords() - x.coords()).norm());
    }
    const std::string tag = "-n" + std::to_string(n);
    suite.checks.push_back({"isometry" + tag, iso, 1e-10, iso < 1e-10});
    suite.checks.push_back({"conformal-factor-vs-fd" + tag, conf, 1e-6, conf < 1e-6});
    suite.checks.push_back({"difference-identity" + tag, diff, 1e-10, diff < 1e-10});
    suite.checks.push_back({"group-closure" + tag, closure, 1e-9, closure < 1e-9});
    suite.checks.push_back({"inverse-roundtrip" + tag, inv, 1e-10, inv < 1e-10});
  }
  suite.seconds = timer.seconds();
  return suite;
}

SuiteResult verify_kernel(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"kernel", {}, 0};
  for (int n = 1; n <= 2; ++n) {
    const int d = n + 1;
    const SphereMap u = reference_map(
        n, MapDescriptor::parse(n == 1 ? "degree:1" : "sphere-degree:1"),
        n == 1 ? 512 : 24);
    const HyperharmonicField field(u);
    Rng rng(substream(seed, n == 1 ? "kernel-1" : "kernel-2"));
    double mass_err = 0;
    for (int i = 0; i < 100; ++i) {
      const BallPoint x(rng.uniform(0.0, 0.99) * rng.unit_vector(d));
      mass_err = std::max(mass_err, std::fabs(field.kernel_mass(x) - 1.0));
    }
    const std::string tag = "-n" + std::to_string(n);
    suite.checks.push_back({"kernel-mass" + tag, mass_err, 1e-6, mass_err < 1e-6});

    // constant boundary data extends to exactly that constant
    MapDescriptor cdesc;
    cdesc.kind = MapDescriptor::Kind::kConstant;
    cdesc.constant = (n == 1) ? Vec{0.6, 0.8} : Vec{0, 0.6, 0.8};
    const HyperharmonicField cfield(
        reference_map(n, cdesc, n == 1 ? 512 : 24));
    double const_err = 0;
    for (int i = 0; i < 50; ++i) {
      const BallPoint x(rng.uniform(0.0, 0.998) * rng.unit_vector(d));
      const_err =
          std::max(const_err, (cfield.evaluate(x) - cdesc.constant).norm());
    }
    suite.checks.push_back(
        {"constant-extension" + tag, const_err, 1e-12, const_err < 1e-12});
  }

  // n = 1 closed form: the extension of a degree-k mode is r^k times it
  Rng rng(substream(seed, "poisson"));
  for (int k = 1; k <= 3; ++k) {
    const HyperharmonicField field(
        reference_map(1, MapDescriptor::parse("degree:" + std::to_string(k)), 512));
    double err = 0;
    for (int i = 0; i < 100; ++i) {
      const double r = rng.uniform(0.0, 0.95);
      const double th = rng.uniform(0.0, 2 * kPi);
      const BallPoint x(Vec{r * std::cos(th), r * std::sin(th)});
      const Vec expected{std::pow(r, k) * std::cos(k * th),
                         std::pow(r, k) * std::sin(k * th)};
      err = std::max(err, (field.evaluate(x) - expected).norm());
    }
    suite.checks.push_back({"poisson-mode-k" + std::to_string(k), err, 1e-6,
                            err < 1e-6});
  }
  suite.seconds = timer.seconds();
  return suite;
}

SuiteResult verify_covariance(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"covariance", {}, 0};

  // n = 1 at the reference grid, five random transforms. The maps are used
  // without their closed forms: off-node boundary values come from grid
  // interpolation, so the defect actually measures quadrature quality and
  // shrinks under refinement instead of sitting at rounding noise.
  {
    const int resolutions[3] = {256, 512, 1024};
    Rng rng(substream(seed, "covariance-1"));
    std::vector<BallPoint> sample;
    for (int i = 0; i < 40; ++i)
      sample.push_back(BallPoint(rng.uniform(0.0, 0.7) * rng.unit_vector(2)));

    double worst_ref = 0;
    std::vector<MobiusTransform> transforms;
    for (int t = 0; t < 5; ++t) transforms.push_back(random_mobius(rng, 2, 0.5));

    const HyperharmonicField ref(values_only(
        reference_map(1, MapDescriptor::parse("degree:1"), resolutions[2])));
    for (const auto& t : transforms)
      worst_ref = std::max(worst_ref, ref.covariance_defect(t, sample));
    suite.checks.push_back(
        {"covariance-defect-n1", worst_ref, 1e-4, worst_ref < 1e-4});

    double defects[3];
    for (int level = 0; level < 3; ++level) {
      const HyperharmonicField f(values_only(reference_map(
          1, MapDescriptor::parse("degree:1"), resolutions[level])));
      defects[level] = f.covariance_defect(transforms[0], sample);
    }
    const bool decreasing = defects[0] > defects[1] && defects[1] > defects[2];
    suite.checks.push_back({"covariance-refinement-n1",
                            defects[2] / std::max(defects[0], 1e-300), 1.0,
                            decreasing});
  }

  // n = 2 at its reference grid
  {
    Rng rng(substream(seed, "covariance-2"));
    std::vector<BallPoint> sample;
    for (int i = 0; i < 25; ++i)
      sample.push_back(BallPoint(rng.uniform(0.0, 0.5) * rng.unit_vector(3)));
    const HyperharmonicField ref(
        reference_map(2, MapDescriptor::parse("sphere-degree:1"), 48));
    double worst = 0;
    for (int t = 0; t < 5; ++t)
      worst = std::max(
          worst, ref.covariance_defect(random_mobius(rng, 3, 0.5), sample));
    suite.checks.push_back({"covariance-defect-n2", worst, 1e-4, worst < 1e-4});
  }
  suite.seconds = timer.seconds();
  return suite;
}

SuiteResult verify_radial_exact(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"radial-exact", {}, 0};
  (void)seed;

  const std::pair<double, double> scales[2] = {{1.0, 0.25}, {0.5, 0.1}};
  const char* descs[3] = {"degree:1", "degree:2", "bubble:1;0.5,0"};
  for (const char* desc : descs) {
    auto field = std::make_shared<HyperharmonicField>(
        reference_map(1, MapDescriptor::parse(desc), 512));
    const CompositeField base(field, ManifoldTarget::circle());
    for (const auto& [rho_star, delta] : scales) {
      const AnnulusIdentity id = annulus_energy_identity_check(
          base, BallPoint::origin(2), rho_star, delta, 48, 512);
      const std::string name = std::string("annulus-identity-") + desc + "-rho" +
                               std::to_string(rho_star);
      const double ratio = id.ratio();
      suite.checks.push_back(
          {name, ratio, 1.01, ratio > 0.99 && ratio < 1.01});
    }
  }

  // off-center variant exercises the translated frame
  {
    auto field = std::make_shared<HyperharmonicField>(
        reference_map(1, MapDescriptor::parse("degree:1"), 512));
    const CompositeField base(field, ManifoldTarget::circle());
    const AnnulusIdentity id = annulus_energy_identity_check(
        base, BallPoint(Vec{0.3, 0.1}), 1.0, 0.25, 48, 512);
    suite.checks.push_back({"annulus-identity-off-center", id.ratio(), 1.01,
                            id.ratio() > 0.99 && id.ratio() < 1.01});
  }

  // the closed-form factor against quadrature of the radial 1/r integrand
  {
    const double rho_star = 1.0, delta = 0.25;
    const double closed = std::sinh(rho_star) *
                          std::log(std::tanh(0.5 * rho_star) / std::tanh(0.5 * delta));
    const double re = euclidean_radius(rho_star), de = euclidean_radius(delta);
    const double quad =
        (2.0 * re / (1.0 - re * re)) *
        adaptive_simpson([](double r) { return 1.0 / r; }, de, re, 1e-12);
    suite.checks.push_back({"annulus-factor-two-ways",
                            std::fabs(closed - quad), 1e-9,
                            std::fabs(closed - quad) < 1e-9});
  }
  suite.seconds = timer.seconds();
  return suite;
}

SuiteResult verify_weak_type(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"weak-type", {}, 0};
  const std::vector<double> lambdas = log_lambda_grid(1e-2, 1e2, 17);
  const char* descs[2] = {"degree:1", "degree:2"};
  for (const char* desc : descs) {
    auto field = std::make_shared<HyperharmonicField>(
        reference_map(1, MapDescriptor::parse(desc), 512));
    const CompositeField base(field, ManifoldTarget::circle());
    const WeakTypeCheck check = weak_type_check(base, BallPoint::origin(2), 1.0,
                                                lambdas, 20000, 256, seed);
    double worst = 0;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      worst = std::max(worst,
                       (check.lhs[i] - 3.0 * check.lhs_se[i]) / check.rhs);
    suite.checks.push_back({std::string("weak-type-") + desc, worst, 1.0,
                            check.holds(3.0)});
  }
  suite.seconds = timer.seconds();
  return suite;
}

namespace {

void covering_checks(SuiteResult& suite, int d, double region, double rho,
                     std::uint64_t seed) {
  const HyperbolicCovering cov = build_covering(d, region, rho, seed);
  const int count = static_cast<int>(cov.centers.size());
  const std::string tag = "-d" + std::to_string(d) + "-region" +
                          std::to_string(region).substr(0, 3);

  double min_pair = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(dynamic) reduction(min : min_pair)
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      min_pair = std::min(
          min_pair, hyperbolic_distance(cov.centers[i], cov.centers[j]));
  suite.checks.push_back(
      {"packing-separation" + tag, min_pair, rho, min_pair >= rho});
  suite.checks.push_back({"coverage-sampled" + tag,
                          cov.coverage_verified ? 1.0 : 0.0, 1.0,
                          cov.coverage_verified});

  double min_class_pair = std::numeric_limits<double>::infinity();
  for (const auto& cls : cov.color_classes)
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j)
        min_class_pair =
            std::min(min_class_pair, hyperbolic_distance(cov.centers[cls[i]],
                                                         cov.centers[cls[j]]));
  suite.checks.push_back({"color-class-separation" + tag, min_class_pair,
                          4.0 * rho, min_class_pair > 4.0 * rho});

  bool mult_ok = true;
  double worst_ratio = 0;
  for (double sigma : {rho, 2.0 * rho, 4.0 * rho}) {
    const double bound = cov.multiplicity_bound(sigma);
    for (int i = 0; i < count; ++i) {
      const int c = cov.count_in_ball(cov.centers[i], sigma);
      worst_ratio = std::max(worst_ratio, c / bound);
      if (c > bound) mult_ok = false;
    }
  }
  suite.checks.push_back(
      {"multiplicity-bound" + tag, worst_ratio, 1.0, mult_ok});
  suite.checks.push_back({"color-count-bound" + tag,
                          static_cast<double>(cov.num_colors()),
                          cov.color_count_bound(),
                          cov.num_colors() <= cov.color_count_bound()});
}

}  // namespace

SuiteResult verify_covering(std::uint64_t seed) {
  Timer timer;
  SuiteResult suite{"covering", {}, 0};
  covering_checks(suite, 2, 3.0, 0.5, seed);
  covering_checks(suite, 2, 4.0, 1.0, seed);
  covering_checks(suite, 3, 3.0, 0.5, seed);
  suite.seconds = timer.seconds();
  return suite;
}

std::vector<SuiteResult> run_suites(const std::string& selector,
                                    std::uint64_t seed) {
  std::vector<SuiteResult> out;
  const bool all = selector == "all";
  if (all || selector == "mobius") out.push_back(verify_mobius(seed));
  if (all || selector == "kernel") out.push_back(verify_kernel(seed));
  if (all || selector == "covariance") out.push_back(verify_covariance(seed));
  if (all || selector == "radial-exact") out.push_back(verify_radial_exact(seed));
  if (all || selector == "weak-type") out.push_back(verify_weak_type(seed));
  if (all || selector == "covering") out.push_back(verify_covering(seed));
  if (out.empty())
    throw std::invalid_argument("unknown verify suite '" + selector + "'");
  return out;
}

}  // namespace hypext
