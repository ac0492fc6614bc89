#include "hypext/extension.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hypext/parallel.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;
// A tier is usable at x when its angular spacing is below this fraction of
// the kernel peak width (1 - |x|). Beyond the top tier the normalized
// quadrature degrades to a local node average, which still carries
// value-level accuracy; the sub-1e-6 regime of the mass and closed-form
// checks lives well inside the ladder.
constexpr double kSpacingFactor = 0.2;
constexpr int kMaxCircleNodes = 32768;
constexpr int kMaxLatitudes = 1024;
}  // namespace

struct HyperharmonicField::KernelTier {
  // n = 1: a uniform circle rule; n = 2: Gauss-Legendre latitudes times a
  // uniform longitude rule. Node coordinates are implicit in the arrays so
  // a refined tier only stores O(nodes) values, built on first use.
  int n = 1;
  int m = 0;            // n = 1 node count
  int lats = 0, lons = 0;
  double spacing = 0;   // max angular node spacing

  std::vector<double> ct, st;              // circle angles / longitudes
  std::vector<double> lat_z, lat_s, lat_w; // n = 2 latitude data
  std::vector<double> val[kMaxDim];        // planar boundary values
  std::once_flag grid_once, values_once;

  std::size_t node_count() const {
    return n == 1 ? static_cast<std::size_t>(m)
                  : static_cast<std::size_t>(lats) * lons;
  }

  void build_grid() {
    std::call_once(grid_once, [&] {
      if (n == 1) {
        ct.resize(m);
        st.resize(m);
        for (int j = 0; j < m; ++j) {
          const double t = 2.0 * kPi * j / m;
          ct[j] = std::cos(t);
          st[j] = std::sin(t);
        }
      } else {
        const GaussLegendre gl = gauss_legendre(lats);
        lat_z = gl.nodes;
        lat_w = gl.weights;
        lat_s.resize(lats);
        for (int i = 0; i < lats; ++i)
          lat_s[i] = std::sqrt(std::max(0.0, 1.0 - lat_z[i] * lat_z[i]));
        ct.resize(lons);
        st.resize(lons);
        for (int j = 0; j < lons; ++j) {
          const double t = 2.0 * kPi * j / lons;
          ct[j] = std::cos(t);
          st[j] = std::sin(t);
        }
      }
    });
  }

  void build_values(const SphereMap& u) {
    build_grid();
    std::call_once(values_once, [&] {
      const std::size_t count = node_count();
      const int nu = u.value_dim();
      for (int a = 0; a < nu; ++a) val[a].resize(count);
      if (n == 1) {
        for (int j = 0; j < m; ++j) {
          const Vec v = u.value_at(Vec{ct[j], st[j]});
          for (int a = 0; a < nu; ++a) val[a][j] = v[a];
        }
      } else {
        for (int i = 0; i < lats; ++i)
          for (int j = 0; j < lons; ++j) {
            const Vec v =
                u.value_at(Vec{lat_s[i] * ct[j], lat_s[i] * st[j], lat_z[i]});
            for (int a = 0; a < nu; ++a)
              val[a][static_cast<std::size_t>(i) * lons + j] = v[a];
          }
      }
    });
  }
};

HyperharmonicField::~HyperharmonicField() = default;
HyperharmonicField::HyperharmonicField(HyperharmonicField&&) noexcept = default;

HyperharmonicField::HyperharmonicField(SphereMap boundary)
    : boundary_(std::move(boundary)) {
  const int n = boundary_.dim();
  if (n == 1) {
    int m = boundary_.grid.size();
    while (true) {
      auto t = std::make_unique<KernelTier>();
      t->n = 1;
      t->m = m;
      t->spacing = 2.0 * kPi / m;
      tiers_.push_back(std::move(t));
      if (m >= kMaxCircleNodes) break;
      m = std::min(m * 4, kMaxCircleNodes);
    }
  } else {
    int lats = boundary_.grid.lat_count;
    int lons = boundary_.grid.lon_count;
    while (true) {
      auto t = std::make_unique<KernelTier>();
      t->n = 2;
      t->lats = lats;
      t->lons = lons;
      t->spacing = kPi / lats;
      tiers_.push_back(std::move(t));
      if (lats >= kMaxLatitudes) break;
      lats = std::min(lats * 2, kMaxLatitudes);
      lons *= 2;
    }
  }
}

const HyperharmonicField::KernelTier& HyperharmonicField::tier_for(
    double r) const {
  const double needed = kSpacingFactor * (1.0 - r);
  for (const auto& t : tiers_)
    if (t->spacing <= needed) return *t;
  return *tiers_.back();
}

void HyperharmonicField::accumulate(const BallPoint& x, bool with_gradient,
                                    double* mass, Vec* value, Mat* jac) const {
  const int n = boundary_dim();
  const int nu = value_dim();
  const int d = ambient_dim();
  if (x.ambient_dim() != d)
    throw std::invalid_argument("hyperharmonic field: point dimension mismatch");
  const double r = x.norm();
  if (r > kEvaluableLimit)
    throw std::runtime_error(
        "hyperharmonic field: |x| > 1-1e-6 is outside the evaluable region; "
        "boundary behaviour is probed with nontangential_check instead");

  auto& tier = const_cast<KernelTier&>(tier_for(r));
  tier.build_values(boundary_);

  double s = 0;              // sum w K
  double p[kMaxDim] = {};    // sum w K u
  double av[kMaxDim] = {};   // sum w K (x-y)/q
  double b[kMaxDim][kMaxDim] = {};  // sum w K u (x-y)/q

  const Vec& xc = x.coords();
  if (n == 1) {
    const double x0 = xc[0], x1 = xc[1];
    const double* ct = tier.ct.data();
    const double* st = tier.st.data();
    const double* v0 = tier.val[0].data();
    const double* v1 = nu > 1 ? tier.val[1].data() : nullptr;
    const int m = tier.m;
    double s_acc = 0, p0 = 0, p1 = 0, a0 = 0, a1 = 0;
    double b00 = 0, b01 = 0, b10 = 0, b11 = 0;
    if (!with_gradient) {
      for (int j = 0; j < m; ++j) {
        const double dx = x0 - ct[j], dy = x1 - st[j];
        const double k = 1.0 / (dx * dx + dy * dy);
        s_acc += k;
        p0 += k * v0[j];
        if (v1) p1 += k * v1[j];
      }
    } else {
      for (int j = 0; j < m; ++j) {
        const double dx = x0 - ct[j], dy = x1 - st[j];
        const double q = dx * dx + dy * dy;
        const double k = 1.0 / q;
        const double kq0 = k * dx * k, kq1 = k * dy * k;  // K (x-y)/q
        s_acc += k;
        p0 += k * v0[j];
        a0 += kq0;
        a1 += kq1;
        b00 += v0[j] * kq0;
        b01 += v0[j] * kq1;
        if (v1) {
          p1 += k * v1[j];
          b10 += v1[j] * kq0;
          b11 += v1[j] * kq1;
        }
      }
    }
    const double w = 2.0 * kPi / m;
    s = w * s_acc;
    p[0] = w * p0;
    p[1] = w * p1;
    av[0] = w * a0;
    av[1] = w * a1;
    b[0][0] = w * b00;
    b[0][1] = w * b01;
    b[1][0] = w * b10;
    b[1][1] = w * b11;
  } else {
    const double x0 = xc[0], x1 = xc[1], x2 = xc[2];
    const double wlon = 2.0 * kPi / tier.lons;
    for (int i = 0; i < tier.lats; ++i) {
      const double zi = tier.lat_z[i], si = tier.lat_s[i];
      const double wi = tier.lat_w[i] * wlon;
      const std::size_t base = static_cast<std::size_t>(i) * tier.lons;
      for (int j = 0; j < tier.lons; ++j) {
        const double dx = x0 - si * tier.ct[j];
        const double dy = x1 - si * tier.st[j];
        const double dz = x2 - zi;
        const double q = dx * dx + dy * dy + dz * dz;
        const double k = wi / (q * q);
        s += k;
        for (int a = 0; a < nu; ++a) p[a] += k * tier.val[a][base + j];
        if (with_gradient) {
          const double kq = k / q;
          const double g0 = kq * dx, g1 = kq * dy, g2 = kq * dz;
          av[0] += g0;
          av[1] += g1;
          av[2] += g2;
          for (int a = 0; a < nu; ++a) {
            const double u = tier.val[a][base + j];
            b[a][0] += u * g0;
            b[a][1] += u * g1;
            b[a][2] += u * g2;
          }
        }
      }
    }
  }

  if (mass) {
    *mass = std::pow(1.0 - r * r, n) * s / sphere_area(n);
  }
  if (value) {
    Vec v(nu);
    for (int a = 0; a < nu; ++a) v[a] = p[a] / s;
    *value = v;
  }
  if (jac) {
    // the (1-|x|^2)-drift of the kernel cancels under normalization:
    // D(P/S) = -2n (B - (P/S) A^T) / S
    Mat j(nu, d);
    for (int a = 0; a < nu; ++a)
      for (int c = 0; c < d; ++c)
        j(a, c) = -2.0 * n * (b[a][c] - (p[a] / s) * av[c]) / s;
    *jac = j;
  }
}

Vec HyperharmonicField::evaluate(const BallPoint& x) const {
  Vec v;
  accumulate(x, false, nullptr, &v, nullptr);
  return v;
}

Mat HyperharmonicField::derivative(const BallPoint& x) const {
  Mat j;
  accumulate(x, true, nullptr, nullptr, &j);
  return j;
}

double HyperharmonicField::kernel_mass(const BallPoint& x) const {
  // only the grid is needed, values are not touched
  auto& tier = const_cast<KernelTier&>(tier_for(x.norm()));
  tier.build_grid();
  const int n = boundary_dim();
  const Vec& xc = x.coords();
  double s = 0;
  if (n == 1) {
    for (int j = 0; j < tier.m; ++j) {
      const double dx = xc[0] - tier.ct[j], dy = xc[1] - tier.st[j];
      s += 1.0 / (dx * dx + dy * dy);
    }
    s *= 2.0 * kPi / tier.m;
  } else {
    const double wlon = 2.0 * kPi / tier.lons;
    for (int i = 0; i < tier.lats; ++i) {
      const double zi = tier.lat_z[i], si = tier.lat_s[i];
      const double wi = tier.lat_w[i] * wlon;
      double row = 0;
      for (int j = 0; j < tier.lons; ++j) {
        const double dx = xc[0] - si * tier.ct[j];
        const double dy = xc[1] - si * tier.st[j];
        const double dz = xc[2] - zi;
        const double q = dx * dx + dy * dy + dz * dz;
        row += 1.0 / (q * q);
      }
      s += wi * row;
    }
  }
  return std::pow(1.0 - xc.norm2(), n) * s / sphere_area(n);
}

double HyperharmonicField::covariance_defect(
    const MobiusTransform& t, std::span<const BallPoint> sample) const {
  const HyperharmonicField composed(compose_with_mobius(boundary_, t));
  double defect = 0;
  for (const BallPoint& x : sample) {
    const Vec lhs = composed.evaluate(x);
    const Vec rhs = evaluate(t.apply(x));
    defect = std::max(defect, (lhs - rhs).norm());
  }
  return defect;
}

double HyperharmonicField::hyperbolic_energy(int mc_samples, std::uint64_t seed,
                                             double truncation_radius,
                                             double* std_error) const {
  if (mc_samples < 10000)
    throw std::invalid_argument("hyperbolic_energy: needs at least 1e4 samples");
  const int d = ambient_dim();
  const int n = boundary_dim();
  const double rt = euclidean_radius(truncation_radius);
  const double vol = (d == 2) ? kPi * rt * rt : 4.0 / 3.0 * kPi * rt * rt * rt;
  const std::uint64_t stream = substream(seed, "mc-energy");

  std::vector<double> term;
  par::map_index(static_cast<std::size_t>(mc_samples), term, [&](std::size_t i) {
    Rng rng = rng_at(stream, i);
    const BallPoint x(rng.ball_point(d, rt));
    return std::pow(operator_norm(derivative(x)), n + 1);
  });
  const double mean =
      par::sum_index_serial(term.size(), [&](std::size_t i) { return term[i]; }) /
      mc_samples;
  if (std_error) {
    const double var =
        par::sum_index_serial(term.size(),
                              [&](std::size_t i) {
                                const double dlt = term[i] - mean;
                                return dlt * dlt;
                              }) /
        (mc_samples - 1.0);
    *std_error = vol * std::sqrt(var / mc_samples);
  }
  return vol * mean;
}

bool NontangentialReport::tail_decreasing(int tail, double slack) const {
  // deviations below the floor are rounding noise, not a trend
  constexpr double kNoiseFloor = 1e-12;
  const int k = static_cast<int>(deviations.size());
  if (k < 2) return true;
  const int start = std::max(0, k - tail);
  for (int i = start; i + 1 < k; ++i)
    if (deviations[i + 1] > slack * deviations[i] + kNoiseFloor) return false;
  return true;
}

NontangentialReport HyperharmonicField::nontangential_check(
    const Vec& boundary_point, double alpha, int j_begin, int j_end) const {
  const Vec y = boundary_point.normalized();
  Vec t(y.size());
  if (y.size() == 2) {
    t = Vec{-y[1], y[0]};
  } else {
    Vec seed = (std::fabs(y[2]) < 0.9) ? Vec{0, 0, 1} : Vec{1, 0, 0};
    t = (seed - y.dot(seed) * y).normalized();
  }
  NontangentialReport rep;
  rep.boundary_value = boundary_.value_at(y);
  for (int j = j_begin; j <= j_end; ++j) {
    const double rj = 1.0 - std::pow(2.0, -j);
    const Vec dir = (y + (alpha * std::pow(2.0, -j)) * t).normalized();
    const BallPoint xj(rj * dir);
    rep.radii.push_back(rj);
    rep.deviations.push_back((evaluate(xj) - rep.boundary_value).norm());
  }
  return rep;
}

}  // namespace hypext
