#include "hypext/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hypext/parallel.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"
#include "hypext/scanner.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSphereMargin = 1e-9;  // strict-avoidance margin for S-balls

// derivative requested exactly on a redirect sphere (one-sided limits differ)
class BoundaryAmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double ball_volume_euclid(int d, double r) {
  return d == 2 ? kPi * r * r : 4.0 / 3.0 * kPi * r * r * r;
}

}  // namespace

RadialRedirect::RadialRedirect(const HyperbolicBall& b, int stage_index)
    : ball(b),
      stage(stage_index),
      to_frame(MobiusTransform::translation(b.center)),
      from_frame(MobiusTransform::translation(b.center).inverse()),
      frame_radius(euclidean_radius(b.radius)) {}

CompositeField::CompositeField(std::shared_ptr<const HyperharmonicField> base,
                               ManifoldTarget target)
    : base_(std::move(base)), target_(std::move(target)) {}

BallPoint CompositeField::resolve(const BallPoint& x, bool* touched) const {
  if (touched) *touched = false;
  BallPoint cur = x;
  for (auto it = redirects_.rbegin(); it != redirects_.rend(); ++it) {
    if (!it->ball.contains(cur)) continue;
    Vec z = it->to_frame.apply(cur).coords();
    const double r = z.norm();
    if (r < 1e-14)
      throw std::domain_error(
          "composite field: evaluation at a redirect center (removable "
          "singularity)");
    z *= it->frame_radius / r;
    cur = it->from_frame.apply(BallPoint(z));
    if (touched) *touched = true;
  }
  return cur;
}

Vec CompositeField::evaluate(const BallPoint& x) const {
  const Vec v = base_->evaluate(resolve(x));
  return project_ ? target_.retract(v) : v;
}

Mat CompositeField::jacobian(const BallPoint& x) const {
  const int d = ambient_dim();
  Mat chain = Mat::identity(d);
  BallPoint cur = x;
  bool touched = false;
  for (auto it = redirects_.rbegin(); it != redirects_.rend(); ++it) {
    const double dist = hyperbolic_distance(it->ball.center, cur);
    if (std::fabs(dist - it->ball.radius) < 1e-12)
      throw BoundaryAmbiguityError(
          "composite field: derivative on a redirect boundary sphere");
    if (dist >= it->ball.radius) continue;
    const Vec z = it->to_frame.apply(cur).coords();
    const double r = z.norm();
    if (r < 1e-14)
      throw std::domain_error(
          "composite field: derivative at a redirect center (removable "
          "singularity)");
    const Mat j_in = it->to_frame.jacobian(cur);
    Vec zhat = (1.0 / r) * z;
    Mat j_proj = tangent_projector(zhat);
    j_proj *= it->frame_radius / r;
    const BallPoint znew(it->frame_radius * zhat);
    const Mat j_out = it->from_frame.jacobian(znew);
    chain = j_out * (j_proj * (j_in * chain));
    cur = it->from_frame.apply(znew);
    touched = true;
  }
  (void)touched;
  Mat d_base = base_->derivative(cur);
  Mat result = d_base * chain;
  if (project_) {
    const Vec v = base_->evaluate(cur);
    result = target_.retract_jacobian(v) * result;
  }
  return result;
}

CompositeField CompositeField::with_redirect(const HyperbolicBall& ball,
                                             int stage) const {
  CompositeField out = *this;
  out.redirects_.emplace_back(ball, stage);
  return out;
}

CompositeField CompositeField::with_final_projection() const {
  CompositeField out = *this;
  out.project_ = true;
  return out;
}

// ---------------------------------------------------------------------------

double boundary_dirichlet_integral(const CompositeField& field,
                                   const BallPoint& center, double radius,
                                   int angular_samples) {
  const int n = field.boundary_dim();
  const double re = euclidean_radius(radius);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  const SphereGrid ang =
      n == 1 ? SphereGrid::circle(angular_samples)
             : SphereGrid::sphere(
                   std::max(4, static_cast<int>(std::sqrt(angular_samples / 2.0))),
                   std::max(8, 2 * static_cast<int>(std::sqrt(angular_samples / 2.0))));

  const double sum = par::sum_index(ang.nodes.size(), [&](std::size_t i) {
    const Vec z = re * ang.nodes[i];
    const BallPoint x = back.apply(BallPoint(z));
    const Mat dw = field.jacobian(x) * back.jacobian(BallPoint(z));
    const Mat tang = dw * tangent_projector(ang.nodes[i]);
    return ang.weights[i] * std::pow(operator_norm(tang), n + 1);
  });
  // hyperbolic norm and surface measure factors against the Euclidean rule
  return 0.5 * (1.0 - re * re) * std::pow(re, n) * sum;
}

AnnulusIdentity annulus_energy_identity_check(const CompositeField& boundary_field,
                                              const BallPoint& center,
                                              double rho_star, double delta,
                                              int radial_points,
                                              int angular_samples) {
  const int n = boundary_field.boundary_dim();
  const CompositeField v = boundary_field.with_redirect(
      HyperbolicBall(center, rho_star), /*stage=*/1 + (boundary_field.redirects().empty()
                                                           ? 0
                                                           : boundary_field.redirects().back().stage));
  const double re = euclidean_radius(rho_star);
  const double de = euclidean_radius(delta);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  const SphereGrid ang =
      n == 1 ? SphereGrid::circle(angular_samples)
             : SphereGrid::sphere(
                   std::max(4, static_cast<int>(std::sqrt(angular_samples / 2.0))),
                   std::max(8, 2 * static_cast<int>(std::sqrt(angular_samples / 2.0))));

  // interior integral in the frame, logarithmic radial substitution
  const GaussLegendre gl = gauss_legendre(radial_points);
  const double t0 = std::log(de), t1 = std::log(re);
  AnnulusIdentity id;
  id.lhs = par::sum_index(
      static_cast<std::size_t>(radial_points) * ang.nodes.size(),
      [&](std::size_t idx) {
        const std::size_t ir = idx / ang.nodes.size();
        const std::size_t ia = idx % ang.nodes.size();
        const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl.nodes[ir];
        const double s = std::exp(t);
        const Vec z = s * ang.nodes[ia];
        const BallPoint x = back.apply(BallPoint(z));
        const Mat dv = v.jacobian(x) * back.jacobian(BallPoint(z));
        const double wr = 0.5 * (t1 - t0) * gl.weights[ir];
        return wr * ang.weights[ia] * std::pow(operator_norm(dv), n + 1) *
               std::pow(s, n + 1);
      });
  id.factor = std::sinh(rho_star) *
              std::log(std::tanh(0.5 * rho_star) / std::tanh(0.5 * delta));
  id.rhs = id.factor * boundary_dirichlet_integral(boundary_field, center,
                                                   rho_star, angular_samples);
  return id;
}

bool WeakTypeCheck::holds(double se_factor) const {
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lhs[i] > rhs + se_factor * lhs_se[i]) return false;
  return true;
}

WeakTypeCheck weak_type_check(const CompositeField& boundary_field,
                              const BallPoint& center, double rho_star,
                              const std::vector<double>& lambdas,
                              int mc_samples, int angular_samples,
                              std::uint64_t seed) {
  const int n = boundary_field.boundary_dim();
  const int d = boundary_field.ambient_dim();
  const CompositeField v = boundary_field.with_redirect(
      HyperbolicBall(center, rho_star),
      1 + (boundary_field.redirects().empty() ? 0
                                              : boundary_field.redirects().back().stage));
  const double re = euclidean_radius(rho_star);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  const double vol = ball_volume_euclid(d, re);
  const std::uint64_t stream = substream(seed, "mc-weak-type");

  // per-sample hyperbolic gradient value and mu_H weight, in the frame
  struct Sample {
    double lambda_v, weight;
  };
  std::vector<Sample> samples(mc_samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(mc_samples); ++i) {
    Rng rng = rng_at(stream, static_cast<std::uint64_t>(i));
    const Vec z = rng.ball_point(d, re);
    const BallPoint x = back.apply(BallPoint(z));
    double lam = 0;
    try {
      lam = dual_norm_factor(x) * operator_norm(v.jacobian(x));
    } catch (const std::exception&) {
      lam = 0;  // measure-zero boundary/center hits
    }
    const double density = std::pow(2.0 / (1.0 - z.norm2()), d);
    samples[static_cast<std::size_t>(i)] = {lam, vol * density / mc_samples};
  }

  WeakTypeCheck check;
  check.lambdas = lambdas;
  for (double lam : lambdas) {
    // estimate = sum of weights over the superlevel samples; the weights
    // carry 1/N, so Var(estimate) ~ sum of squared weights
    double est = 0, sumsq = 0;
    for (const auto& s : samples) {
      if (s.lambda_v <= lam) continue;
      est += s.weight;
      sumsq += s.weight * s.weight;
    }
    const double lampow = std::pow(lam, n + 1);
    check.lhs.push_back(lampow * est);
    const double var = std::max(0.0, sumsq - est * est / mc_samples);
    check.lhs_se.push_back(lampow * std::sqrt(var));
  }
  check.rhs = std::sinh(rho_star) / (n + 1) *
              boundary_dirichlet_integral(boundary_field, center, rho_star,
                                          angular_samples);
  return check;
}

// ---------------------------------------------------------------------------
// improve_on_ball

namespace {

// MC of the conformally invariant energy over B^H_{radius}(center) minus
// delta-balls around the listed points.
double region_energy_mc(const CompositeField& field, const BallPoint& center,
                        double radius, const std::vector<BallPoint>& holes,
                        double delta, int mc_samples, std::uint64_t stream,
                        double* se_out) {
  const int d = field.ambient_dim();
  const int n = field.boundary_dim();
  const double re = euclidean_radius(radius);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  const double vol = ball_volume_euclid(d, re);
  std::vector<double> term;
  par::map_index(static_cast<std::size_t>(mc_samples), term, [&](std::size_t i) {
    Rng rng = rng_at(stream, i);
    const Vec z = rng.ball_point(d, re);
    const BallPoint x = back.apply(BallPoint(z));
    for (const BallPoint& b : holes)
      if (hyperbolic_distance(b, x) < delta) return 0.0;
    try {
      const Mat dv = field.jacobian(x) * back.jacobian(BallPoint(z));
      return std::pow(operator_norm(dv), n + 1);
    } catch (const std::exception&) {
      return 0.0;
    }
  });
  const double mean =
      par::sum_index_serial(term.size(), [&](std::size_t i) { return term[i]; }) /
      mc_samples;
  if (se_out) {
    const double var = par::sum_index_serial(term.size(),
                                             [&](std::size_t i) {
                                               const double dl = term[i] - mean;
                                               return dl * dl;
                                             }) /
                       (mc_samples - 1.0);
    *se_out = vol * std::sqrt(var / mc_samples);
  }
  return vol * mean;
}

// Minimum superlevel sample count for a tail-measure estimate to carry
// signal; above that level the one-sample fluctuations dominate the true
// (finite) limit of lambda^{n+1} mu and the sup estimate spikes.
constexpr int kMinTailSamples = 16;

// sup over lambda of lambda^{n+1} mu_H({ |DV|_H > lambda }) inside
// B^H_{delta}(center), from one weighted MC sample cloud; the sup is
// restricted to MC-resolvable levels.
double quasinorm_mc(const CompositeField& field, const BallPoint& center,
                    double delta, int mc_samples, std::uint64_t stream,
                    double* se_out) {
  const int d = field.ambient_dim();
  const int n = field.boundary_dim();
  const double re = euclidean_radius(delta);
  const MobiusTransform back = MobiusTransform::translation(center).inverse();
  const double vol = ball_volume_euclid(d, re);

  struct Sample {
    double lam, w;
  };
  std::vector<Sample> samples(mc_samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(mc_samples); ++i) {
    Rng rng = rng_at(stream, static_cast<std::uint64_t>(i));
    const Vec z = rng.ball_point(d, re);
    const BallPoint x = back.apply(BallPoint(z));
    double lam = 0;
    try {
      lam = dual_norm_factor(x) * operator_norm(field.jacobian(x));
    } catch (const std::exception&) {
      lam = 0;
    }
    const double density = std::pow(2.0 / (1.0 - z.norm2()), d);
    samples[static_cast<std::size_t>(i)] = {lam, vol * density / mc_samples};
  }
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.lam > b.lam; });
  double best = 0, best_tail = 0, best_lam = 0, tail = 0;
  for (int i = 0; i < mc_samples; ++i) {
    // measure of { > lam } just above this sample's level
    const double q = std::pow(samples[i].lam, n + 1) * tail;
    if (i >= kMinTailSamples && q > best) {
      best = q;
      best_tail = tail;
      best_lam = samples[i].lam;
    }
    tail += samples[i].w;
  }
  if (se_out) {
    // binomial-style error of the tail measure at the attaining level
    double sq = 0;
    for (const auto& s : samples)
      if (s.lam > best_lam) sq += s.w * s.w * mc_samples;
    const double mean = best_tail;
    const double var = std::max(0.0, sq / mc_samples - mean * mean / mc_samples);
    *se_out = std::pow(best_lam, n + 1) * std::sqrt(var);
  }
  return best;
}

}  // namespace

bool ImproveReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ImproveResult improve_on_ball(const CompositeField& u, const BallPoint& center,
                              double rho, double delta, const SingularitySet& s,
                              double iota_eff, const ImproveParams& params,
                              int stage, std::uint64_t seed) {
  const int d = u.ambient_dim();
  const int n = u.boundary_dim();

  // hypothesis: few singularities nearby
  int count3 = 0;
  for (const BallPoint& b : s.points)
    if (hyperbolic_distance(center, b) <= 3.0 * rho) ++count3;
  if (count3 > rho / (4.0 * delta))
    throw ImproveHypothesisError(
        "improve_on_ball: " + std::to_string(count3) +
        " singularities inside 3*rho exceed rho/(4 delta) = " +
        std::to_string(rho / (4.0 * delta)));

  // scan candidate radii
  const int k_count = params.radius_candidates;
  std::vector<double> radii(k_count);
  std::vector<char> good(k_count, 0), blocked(k_count, 0);
  const std::uint64_t cand_stream = substream(seed, "improve-candidates");
  for (int k = 0; k < k_count; ++k) {
    radii[k] = rho * (1.0 + (k + 0.5) / k_count);
    for (const BallPoint& b : s.points)
      if (std::fabs(hyperbolic_distance(center, b) - radii[k]) <=
          delta + kSphereMargin) {
        blocked[k] = 1;
        break;
      }
  }
  const double d0 = hyperbolic_distance(
      BallPoint::origin(d), center);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < k_count; ++k) {
    // certified good: the sphere never approaches the region where the
    // field can leave the tube
    if (std::fabs(radii[k] - d0) >= params.certified_good_radius) {
      good[k] = 1;
      continue;
    }
    const auto pts = sample_hyperbolic_sphere(center, radii[k],
                                              params.sphere_samples,
                                              cand_stream + 977 * k);
    bool ok = true;
    for (const BallPoint& p : pts)
      if (u.target().distance_to(u.evaluate(p)) >= iota_eff) {
        ok = false;
        break;
      }
    good[k] = ok ? 1 : 0;
  }

  int bad_count = 0;
  for (int k = 0; k < k_count; ++k)
    if (!good[k]) ++bad_count;
  const double bad_fraction = static_cast<double>(bad_count) / k_count;
  if (bad_fraction > 0.25)
    throw ImproveHypothesisError(
        "improve_on_ball: bad-radius fraction " + std::to_string(bad_fraction) +
        " exceeds 1/4 on (rho, 2 rho); the scale hypothesis fails here");

  std::vector<int> admissible;
  for (int k = 0; k < k_count; ++k)
    if (good[k] && !blocked[k]) admissible.push_back(k);
  if (admissible.empty())
    throw ImproveHypothesisError(
        "improve_on_ball: no admissible radius among " +
        std::to_string(k_count) + " candidates (bad fraction " +
        std::to_string(bad_fraction) + ")");

  // pick the admissible radius with the least boundary Dirichlet energy,
  // scoring an evenly spaced subset when many radii are admissible
  std::vector<int> scored;
  if (static_cast<int>(admissible.size()) <= params.max_energy_candidates) {
    scored = admissible;
  } else {
    for (int i = 0; i < params.max_energy_candidates; ++i)
      scored.push_back(admissible[i * admissible.size() /
                                  params.max_energy_candidates]);
  }
  double best_energy = std::numeric_limits<double>::infinity();
  double rho_star = radii[scored.front()];
  for (int k : scored) {
    const double e = boundary_dirichlet_integral(u, center, radii[k],
                                                 params.boundary_quad_samples);
    if (e < best_energy) {
      best_energy = e;
      rho_star = radii[k];
    }
  }

  ImproveResult result{u.with_redirect(HyperbolicBall(center, rho_star), stage),
                       {},
                       {}};
  result.report.rho_star = rho_star;
  result.report.boundary_energy = best_energy;
  result.report.admissible_candidates = static_cast<int>(admissible.size());
  result.report.bad_fraction = bad_fraction;

  for (std::size_t i = 0; i < s.points.size(); ++i)
    if (hyperbolic_distance(center, s.points[i]) + delta <
        rho_star - kSphereMargin)
      result.erased.push_back(static_cast<int>(i));

  if (!params.run_conclusion_checks) return result;

  auto& checks = result.report.checks;
  const CompositeField& v = result.field;

  // (i) erased singularity balls sit inside B_{2 rho}
  {
    InequalityRecord rec{"erased-balls-inside-2rho", 0, 2 * rho, 0, true};
    for (int i : result.erased)
      rec.lhs = std::max(
          rec.lhs, hyperbolic_distance(center, s.points[i]) + delta);
    rec.pass = rec.lhs < 2 * rho;
    checks.push_back(rec);
  }

  // (ii) bit-identical pass-through outside B_{2 rho}
  {
    const std::uint64_t stream = substream(seed, "improve-passthrough");
    double diff = 0;
    for (int i = 0; i < 32; ++i) {
      Rng rng = rng_at(stream, i);
      const double r = rng.uniform(2.0 * rho + 1e-6, 2.0 * rho + 0.5);
      const Vec dir = rng.unit_vector(d);
      const BallPoint x = MobiusTransform::translation(center).inverse().apply(
          BallPoint(euclidean_radius(r) * dir));
      diff = std::max(diff, (v.evaluate(x) - u.evaluate(x)).norm());
    }
    checks.push_back({"pass-through-outside-2rho", diff, 0, 0, diff == 0.0});
  }

  // (iii) surviving singularity balls untouched
  {
    const std::uint64_t stream = substream(seed, "improve-preserved");
    double diff = 0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (std::find(result.erased.begin(), result.erased.end(),
                    static_cast<int>(i)) != result.erased.end())
        continue;
      for (int j = 0; j < 8; ++j) {
        Rng rng = rng_at(stream, i * 8 + j);
        const Vec z = rng.ball_point(d, euclidean_radius(delta) * 0.999);
        const BallPoint x =
            MobiusTransform::translation(s.points[i]).inverse().apply(BallPoint(z));
        double dl = 0;
        try {
          dl = (v.evaluate(x) - u.evaluate(x)).norm();
        } catch (const std::domain_error&) {
          continue;  // redirect-center hit
        }
        diff = std::max(diff, dl);
      }
    }
    checks.push_back({"surviving-balls-untouched", diff, 0, 0, diff == 0.0});
  }

  // (iv) good-set growth: B_rho(a) now maps into the tube, and points that
  // were good stay good
  {
    const std::uint64_t stream = substream(seed, "improve-growth");
    double worst = 0;
    bool implication = true;
    for (int i = 0; i < params.growth_samples; ++i) {
      Rng rng = rng_at(stream, i);
      const Vec z = rng.ball_point(d, euclidean_radius(rho));
      const BallPoint x =
          MobiusTransform::translation(center).inverse().apply(BallPoint(z));
      worst = std::max(worst, v.target().distance_to(v.evaluate(x)));
      const Vec z2 = rng.ball_point(d, euclidean_radius(2.0 * rho));
      const BallPoint x2 =
          MobiusTransform::translation(center).inverse().apply(BallPoint(z2));
      if (u.target().distance_to(u.evaluate(x2)) < iota_eff &&
          v.target().distance_to(v.evaluate(x2)) >= iota_eff)
        implication = false;
    }
    checks.push_back(
        {"good-set-growth", worst, iota_eff, 0, worst < iota_eff && implication});
  }

  // common right-hand side: energy of U over B_{2 rho}(a) minus S-balls
  double energy_se = 0;
  const double annulus_energy =
      region_energy_mc(u, center, 2.0 * rho, s.points, delta,
                       params.mc_samples, substream(seed, "improve-energy"),
                       &energy_se);

  // averaging bound on the selected boundary energy
  {
    InequalityRecord rec{"boundary-energy-averaging", best_energy,
                         4.0 / rho * (annulus_energy + 3 * energy_se), 0, true};
    rec.pass = rec.lhs <= rec.rhs * 1.05;
    checks.push_back(rec);
  }

  // (v) weak-type bound on the new singularity ball
  {
    double qse = 0;
    const double q = quasinorm_mc(v, center, delta,
                                  params.mc_samples,
                                  substream(seed, "improve-quasinorm"), &qse);
    const double eta_ball = 4.0 * std::sinh(2.0 * rho) / ((n + 1) * rho);
    InequalityRecord rec{"new-singularity-weak-type", q,
                         eta_ball * (annulus_energy + 3 * energy_se), 3 * qse,
                         true};
    rec.pass = rec.lhs <= rec.rhs + rec.tolerance;
    checks.push_back(rec);
  }

  // (vi) energy growth off the surviving singularity balls
  {
    std::vector<BallPoint> holes;
    for (std::size_t i = 0; i < s.points.size(); ++i)
      if (std::find(result.erased.begin(), result.erased.end(),
                    static_cast<int>(i)) == result.erased.end())
        holes.push_back(s.points[i]);
    holes.push_back(center);
    double vse = 0;
    const double lhs =
        region_energy_mc(v, center, 2.0 * rho, holes,
                         delta, params.mc_samples,
                         substream(seed, "improve-energy-after"), &vse);
    const double kappa_ball =
        1.0 + 4.0 * std::sinh(2.0 * rho) / rho *
                  std::log(std::tanh(rho) / std::tanh(0.5 * delta));
    InequalityRecord rec{"energy-growth", lhs,
                         kappa_ball * (annulus_energy + 3 * energy_se), 3 * vse,
                         true};
    rec.pass = rec.lhs <= rec.rhs + rec.tolerance;
    checks.push_back(rec);
  }

  return result;
}

}  // namespace hypext
