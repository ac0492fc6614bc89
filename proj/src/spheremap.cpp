#include "hypext/spheremap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hypext/parallel.hpp"
#include "hypext/quadrature.hpp"
#include "hypext/rng.hpp"

namespace hypext {

namespace {
constexpr double kPi = std::numbers::pi;
}

SphereGrid SphereGrid::circle(int m) {
  if (m < 4) throw std::invalid_argument("circle grid needs at least 4 nodes");
  SphereGrid g;
  g.dim = 1;
  g.nodes.reserve(m);
  g.weights.assign(m, 2.0 * kPi / m);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * kPi * i / m;
    g.nodes.push_back(Vec{std::cos(t), std::sin(t)});
  }
  return g;
}

SphereGrid SphereGrid::sphere(int lats, int lons) {
  if (lats < 2 || lons < 4)
    throw std::invalid_argument("sphere grid needs at least 2x4 nodes");
  SphereGrid g;
  g.dim = 2;
  g.lat_count = lats;
  g.lon_count = lons;
  const GaussLegendre gl = gauss_legendre(lats);
  g.nodes.reserve(static_cast<std::size_t>(lats) * lons);
  g.weights.reserve(static_cast<std::size_t>(lats) * lons);
  const double wphi = 2.0 * kPi / lons;
  for (int i = 0; i < lats; ++i) {
    const double z = gl.nodes[i];  // cos(theta)
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < lons; ++j) {
      const double phi = 2.0 * kPi * j / lons;
      g.nodes.push_back(Vec{s * std::cos(phi), s * std::sin(phi), z});
      g.weights.push_back(gl.weights[i] * wphi);
    }
  }
  return g;
}

double SphereGrid::total_weight() const {
  return par::sum_index_serial(weights.size(),
                               [&](std::size_t i) { return weights[i]; });
}

double SphereGrid::max_neighbor_spacing() const {
  double m = 0;
  const int count = size();
  if (dim == 1) {
    for (int i = 0; i < count; ++i)
      m = std::max(m, nodes[i].dist(nodes[(i + 1) % count]));
    return m;
  }
  for (int i = 0; i < lat_count; ++i) {
    for (int j = 0; j < lon_count; ++j) {
      const Vec& y = nodes[i * lon_count + j];
      m = std::max(m, y.dist(nodes[i * lon_count + (j + 1) % lon_count]));
      if (i + 1 < lat_count) m = std::max(m, y.dist(nodes[(i + 1) * lon_count + j]));
    }
  }
  return m;
}

Mat tangent_projector(const Vec& unit) {
  Mat p = Mat::identity(unit.size());
  p -= outer(unit, unit);
  return p;
}

// ---------------------------------------------------------------------------
// targets

ManifoldTarget ManifoldTarget::circle() {
  ManifoldTarget t;
  t.name_ = "circle";
  t.ambient_dim_ = 2;
  t.tube_radius_ = 0.95;
  t.distance_ = [](const Vec& y) { return std::fabs(y.norm() - 1.0); };
  t.retract_ = [](const Vec& y) {
    const double r = y.norm();
    if (r < 1e-14) throw std::runtime_error("circle retraction undefined at the center");
    return (1.0 / r) * y;
  };
  t.retract_jacobian_ = [](const Vec& y) {
    const double r = y.norm();
    Mat j = tangent_projector((1.0 / r) * y);
    j *= 1.0 / r;
    return j;
  };
  t.lipschitz_ = [](double iota) { return 1.0 / (1.0 - iota); };
  return t;
}

ManifoldTarget ManifoldTarget::sphere() {
  ManifoldTarget t = circle();
  t.name_ = "sphere";
  t.ambient_dim_ = 3;
  t.distance_ = [](const Vec& y) { return std::fabs(y.norm() - 1.0); };
  t.retract_ = [](const Vec& y) {
    const double r = y.norm();
    if (r < 1e-14) throw std::runtime_error("sphere retraction undefined at the center");
    return (1.0 / r) * y;
  };
  t.retract_jacobian_ = [](const Vec& y) {
    const double r = y.norm();
    Mat j = tangent_projector((1.0 / r) * y);
    j *= 1.0 / r;
    return j;
  };
  return t;
}

namespace {

// Closest ellipse parameter to y, Newton on the stationarity equation.
double ellipse_project_angle(double a, double b, const Vec& y) {
  double phi = std::atan2(y[1] / b, y[0] / a);
  for (int it = 0; it < 60; ++it) {
    const double c = std::cos(phi), s = std::sin(phi);
    const Vec p{a * c, b * s};
    const Vec dp{-a * s, b * c};
    const Vec d2p{-a * c, -b * s};
    const double f = (p - y).dot(dp);
    const double fp = dp.norm2() + (p - y).dot(d2p);
    if (fp == 0) break;
    const double step = f / fp;
    phi -= step;
    if (std::fabs(step) < 1e-14) break;
  }
  return phi;
}

}  // namespace

ManifoldTarget ManifoldTarget::ellipse(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= 0) throw std::invalid_argument("ellipse semi-axes must be positive");
  ManifoldTarget t;
  t.name_ = "ellipse";
  t.ambient_dim_ = 2;
  // half the minimal distance from the curve to a focus
  const double focal = std::sqrt(std::max(0.0, a * a - b * b));
  t.tube_radius_ = (a == b) ? 0.5 * b : 0.5 * (a - focal);
  t.distance_ = [a, b](const Vec& y) {
    const double phi = ellipse_project_angle(a, b, y);
    return (Vec{a * std::cos(phi), b * std::sin(phi)} - y).norm();
  };
  t.retract_ = [a, b](const Vec& y) {
    const double phi = ellipse_project_angle(a, b, y);
    return Vec{a * std::cos(phi), b * std::sin(phi)};
  };
  t.retract_jacobian_ = [t](const Vec& y) {
    const double h = 1e-6;
    Mat j(2, 2);
    for (int k = 0; k < 2; ++k) {
      Vec yp = y, ym = y;
      yp[k] += h;
      ym[k] -= h;
      const Vec d = t.retract_(yp) - t.retract_(ym);
      j(0, k) = d[0] / (2 * h);
      j(1, k) = d[1] / (2 * h);
    }
    return j;
  };
  t.lipschitz_ = [t, a, b](double iota) {
    // no closed form; sampled over tube pairs at a pinned seed
    Rng rng(substream(0x5eedULL, "ellipse-lipschitz"));
    double lip = 1.0;
    for (int i = 0; i < 4000; ++i) {
      const double phi = rng.uniform(0.0, 2 * kPi);
      const Vec base{a * std::cos(phi), b * std::sin(phi)};
      const Vec y = base + iota * rng.uniform01() * rng.unit_vector(2);
      Vec z = y + 1e-4 * rng.unit_vector(2);
      if (t.distance_(y) >= iota || t.distance_(z) >= iota) continue;
      lip = std::max(lip, (t.retract_(y) - t.retract_(z)).norm() /
                              (y - z).norm());
    }
    return lip;
  };
  return t;
}

// ---------------------------------------------------------------------------
// descriptors

int MapDescriptor::boundary_dim() const {
  switch (kind) {
    case Kind::kSphereDegree:
      return 2;
    case Kind::kConstant:
      return constant.size() == 3 ? 2 : 1;
    case Kind::kBubble:
      return bubble_center.size() == 3 ? 2 : 1;
    default:
      return 1;
  }
}

MapDescriptor MapDescriptor::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto nums = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  };
  MapDescriptor d;
  if (kind == "constant") {
    d.kind = Kind::kConstant;
    const auto v = nums(rest);
    if (v.size() < 2 || v.size() > 3)
      throw std::invalid_argument("constant map needs 2 or 3 components");
    d.constant = Vec(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) d.constant[static_cast<int>(i)] = v[i];
  } else if (kind == "degree") {
    d.kind = Kind::kCircleDegree;
    d.degree = static_cast<int>(nums(rest).at(0));
  } else if (kind == "sphere-degree") {
    d.kind = Kind::kSphereDegree;
    d.degree = static_cast<int>(nums(rest).at(0));
  } else if (kind == "bubble") {
    d.kind = Kind::kBubble;
    const auto semi = rest.find(';');
    if (semi == std::string::npos)
      throw std::invalid_argument("bubble descriptor is bubble:k;a1,a2[,a3]");
    d.degree = static_cast<int>(std::stod(rest.substr(0, semi)));
    const auto v = nums(rest.substr(semi + 1));
    d.bubble_center = Vec(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      d.bubble_center[static_cast<int>(i)] = v[i];
  } else if (kind == "ellipse") {
    d.kind = Kind::kEllipseCurve;
    const auto v = nums(rest);
    d.ellipse_a = v.at(0);
    d.ellipse_b = v.at(1);
    if (v.size() > 2) d.degree = static_cast<int>(v[2]);
  } else {
    throw std::invalid_argument("unknown map descriptor kind '" + kind + "'");
  }
  return d;
}

std::string MapDescriptor::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kConstant:
      os << "constant:";
      for (int i = 0; i < constant.size(); ++i)
        os << (i ? "," : "") << constant[i];
      break;
    case Kind::kCircleDegree:
      os << "degree:" << degree;
      break;
    case Kind::kSphereDegree:
      os << "sphere-degree:" << degree;
      break;
    case Kind::kBubble:
      os << "bubble:" << degree << ";";
      for (int i = 0; i < bubble_center.size(); ++i)
        os << (i ? "," : "") << bubble_center[i];
      break;
    case Kind::kEllipseCurve:
      os << "ellipse:" << ellipse_a << "," << ellipse_b << "," << degree;
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// maps

Vec SphereMap::value_at(const Vec& unit) const {
  if (evaluator) return evaluator(unit);
  // interpolation of node values
  if (grid.dim == 1) {
    const int m = grid.size();
    double t = std::atan2(unit[1], unit[0]);
    if (t < 0) t += 2 * kPi;
    const double pos = t / (2 * kPi) * m;
    const int i0 = static_cast<int>(pos) % m;
    const int i1 = (i0 + 1) % m;
    const double f = pos - std::floor(pos);
    return (1.0 - f) * values[i0] + f * values[i1];
  }
  // bilinear in (cos(theta), phi) on the latitude-longitude structure
  const int lats = grid.lat_count, lons = grid.lon_count;
  const double z = unit[2];
  double phi = std::atan2(unit[1], unit[0]);
  if (phi < 0) phi += 2 * kPi;
  const double pos_phi = phi / (2 * kPi) * lons;
  const int j0 = static_cast<int>(pos_phi) % lons;
  const int j1 = (j0 + 1) % lons;
  const double fj = pos_phi - std::floor(pos_phi);
  // latitudes are GL nodes in decreasing z order? gauss_legendre returns
  // descending cos values; find the bracketing pair by scan
  int i0 = 0;
  while (i0 + 1 < lats && grid.nodes[(i0 + 1) * lons][2] > z) ++i0;
  int i1 = std::min(i0 + 1, lats - 1);
  const double z0 = grid.nodes[i0 * lons][2];
  const double z1 = grid.nodes[i1 * lons][2];
  const double fi = (i0 == i1 || z1 == z0) ? 0.0 : (z - z0) / (z1 - z0);
  const Vec a = (1.0 - fj) * values[i0 * lons + j0] + fj * values[i0 * lons + j1];
  const Vec b = (1.0 - fj) * values[i1 * lons + j0] + fj * values[i1 * lons + j1];
  return (1.0 - fi) * a + fi * b;
}

double SphereMap::node_oscillation() const {
  double m = 0;
  const int count = grid.size();
  if (grid.dim == 1) {
    for (int i = 0; i < count; ++i)
      m = std::max(m, (values[i] - values[(i + 1) % count]).norm());
    return m;
  }
  for (int i = 0; i < grid.lat_count; ++i)
    for (int j = 0; j < grid.lon_count; ++j) {
      const Vec& v = values[i * grid.lon_count + j];
      m = std::max(m, (v - values[i * grid.lon_count + (j + 1) % grid.lon_count]).norm());
      if (i + 1 < grid.lat_count)
        m = std::max(m, (v - values[(i + 1) * grid.lon_count + j]).norm());
    }
  return m;
}

bool SphereMap::target_valued(double tol) const {
  for (const Vec& v : values)
    if (target.distance_to(v) >= tol) return false;
  return true;
}

double SphereMap::distance_to_range(const Vec& v) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec& u : values) d = std::min(d, (v - u).norm());
  return d;
}

namespace {

double sphere_angle(const Vec& y, double* phi_out) {
  const double z = std::clamp(y[2], -1.0, 1.0);
  *phi_out = std::atan2(y[1], y[0]);
  return std::acos(z);
}

}  // namespace

SphereMap make_test_map(const MapDescriptor& desc, const SphereGrid& grid,
                        const ManifoldTarget& target) {
  if (grid.dim != desc.boundary_dim())
    throw std::invalid_argument("map descriptor and grid dimensions differ");
  SphereMap u;
  u.grid = grid;
  u.target = target;
  const int k = desc.degree;
  switch (desc.kind) {
    case MapDescriptor::Kind::kConstant: {
      const Vec c = desc.constant;
      u.evaluator = [c](const Vec&) { return c; };
      u.derivative = [c](const Vec& y) { return Mat(c.size(), y.size()); };
      break;
    }
    case MapDescriptor::Kind::kCircleDegree: {
      u.evaluator = [k](const Vec& y) {
        const double t = std::atan2(y[1], y[0]);
        return Vec{std::cos(k * t), std::sin(k * t)};
      };
      u.derivative = [k](const Vec& y) {
        const double t = std::atan2(y[1], y[0]);
        const Vec tangent{-y[1], y[0]};
        const Vec du{-k * std::sin(k * t), k * std::cos(k * t)};
        return outer(du, tangent);
      };
      break;
    }
    case MapDescriptor::Kind::kSphereDegree: {
      // suspension of the circle degree map: (theta, phi) -> (theta, k phi)
      u.evaluator = [k](const Vec& y) {
        double phi;
        const double th = sphere_angle(y, &phi);
        const double s = std::sin(th);
        return Vec{s * std::cos(k * phi), s * std::sin(k * phi), std::cos(th)};
      };
      u.derivative = [k](const Vec& y) {
        double phi;
        const double th = sphere_angle(y, &phi);
        const double s = std::max(std::sin(th), 1e-12);
        const double c = std::cos(th);
        const Vec e_th{c * std::cos(phi), c * std::sin(phi), -std::sin(th)};
        const Vec e_ph{-std::sin(phi), std::cos(phi), 0};
        const Vec du_th{c * std::cos(k * phi), c * std::sin(k * phi), -std::sin(th)};
        const Vec du_ph{-k * std::sin(k * phi) * std::sin(th) / s,
                        k * std::cos(k * phi) * std::sin(th) / s, 0};
        Mat d = outer(du_th, e_th);
        d += outer(du_ph, e_ph);
        return d;
      };
      break;
    }
    case MapDescriptor::Kind::kBubble: {
      MapDescriptor base = desc;
      base.kind = desc.bubble_center.size() == 3
                      ? MapDescriptor::Kind::kSphereDegree
                      : MapDescriptor::Kind::kCircleDegree;
      SphereMap inner = make_test_map(base, grid, target);
      const MobiusTransform t =
          MobiusTransform::translation(BallPoint(desc.bubble_center));
      return compose_with_mobius(inner, t);
    }
    case MapDescriptor::Kind::kEllipseCurve: {
      const double a = desc.ellipse_a, b = desc.ellipse_b;
      u.evaluator = [a, b, k](const Vec& y) {
        const double t = std::atan2(y[1], y[0]);
        return Vec{a * std::cos(k * t), b * std::sin(k * t)};
      };
      u.derivative = [a, b, k](const Vec& y) {
        const double t = std::atan2(y[1], y[0]);
        const Vec tangent{-y[1], y[0]};
        const Vec du{-a * k * std::sin(k * t), b * k * std::cos(k * t)};
        return outer(du, tangent);
      };
      break;
    }
  }
  u.values.reserve(grid.size());
  for (const Vec& y : grid.nodes) u.values.push_back(u.evaluator(y));
  return u;
}

SphereMap make_test_map(const MapDescriptor& desc, const SphereGrid& grid) {
  ManifoldTarget target;
  switch (desc.kind) {
    case MapDescriptor::Kind::kEllipseCurve:
      target = ManifoldTarget::ellipse(desc.ellipse_a, desc.ellipse_b);
      break;
    case MapDescriptor::Kind::kSphereDegree:
      target = ManifoldTarget::sphere();
      break;
    case MapDescriptor::Kind::kConstant:
      target = desc.constant.size() == 3 ? ManifoldTarget::sphere()
                                         : ManifoldTarget::circle();
      break;
    case MapDescriptor::Kind::kBubble:
      target = desc.bubble_center.size() == 3 ? ManifoldTarget::sphere()
                                              : ManifoldTarget::circle();
      break;
    default:
      target = ManifoldTarget::circle();
  }
  return make_test_map(desc, grid, target);
}

SphereMap compose_with_mobius(const SphereMap& u, const MobiusTransform& t) {
  SphereMap v;
  v.grid = u.grid;
  v.target = u.target;
  if (u.evaluator) {
    auto eval = u.evaluator;
    v.evaluator = [eval, t](const Vec& y) { return eval(t.apply_boundary(y)); };
  }
  if (u.derivative) {
    auto du = u.derivative;
    v.derivative = [du, t](const Vec& y) {
      return du(t.apply_boundary(y)) * t.boundary_jacobian(y);
    };
  }
  v.values.reserve(u.grid.size());
  for (const Vec& y : u.grid.nodes) {
    const Vec ty = t.apply_boundary(y);
    v.values.push_back(u.evaluator ? u.evaluator(ty) : u.value_at(ty));
  }
  return v;
}

SphereMap values_only(const SphereMap& u) {
  SphereMap v = u;
  v.evaluator = nullptr;
  v.derivative = nullptr;
  return v;
}

// ---------------------------------------------------------------------------
// seminorms

namespace {

GagliardoEstimate gagliardo_impl(const SphereMap& u, double cutoff, bool parallel) {
  const int m = u.grid.size();
  if (m < 16) throw std::invalid_argument("gagliardo_seminorm: needs at least 16 nodes");
  const int n = u.grid.dim;
  const double p = n + 1;
  const auto& nodes = u.grid.nodes;
  const auto& w = u.grid.weights;
  const auto& vals = u.values;

  auto row = [&](std::size_t i) {
    double s = 0;
    for (int j = 0; j < m; ++j) {
      if (static_cast<int>(i) == j) continue;
      const double d2 = (nodes[i] - nodes[j]).norm2();
      if (d2 < cutoff * cutoff) continue;
      const double diff = (vals[i] - vals[j]).norm();
      s += w[j] * std::pow(diff, p) / std::pow(d2, n);
    }
    return w[i] * s;
  };
  auto excluded_row = [&](std::size_t i) {
    double s = 0;
    for (int j = 0; j < m; ++j) {
      const double d2 = (nodes[i] - nodes[j]).norm2();
      if (static_cast<int>(i) == j || d2 < cutoff * cutoff) s += w[j];
    }
    return w[i] * s;
  };

  GagliardoEstimate e;
  e.grid_resolution = m;
  e.diagonal_cutoff = cutoff;
  e.value = parallel ? par::sum_index_parallel(m, row)
                     : par::sum_index_serial(m, row);
  const double total = u.grid.total_weight();
  const double excluded = parallel ? par::sum_index_parallel(m, excluded_row)
                                   : par::sum_index_serial(m, excluded_row);
  e.excluded_mass_fraction = excluded / (total * total);
  e.cutoff_warning = e.excluded_mass_fraction > 0.05;
  return e;
}

}  // namespace

GagliardoEstimate gagliardo_seminorm(const SphereMap& u) {
  return gagliardo_impl(u, 1.5 * u.grid.max_neighbor_spacing(),
                        par::parallel_enabled());
}

GagliardoEstimate gagliardo_seminorm(const SphereMap& u, double diagonal_cutoff) {
  return gagliardo_impl(u, diagonal_cutoff, par::parallel_enabled());
}

GagliardoEstimate gagliardo_seminorm_serial(const SphereMap& u,
                                            double diagonal_cutoff) {
  return gagliardo_impl(u, diagonal_cutoff, false);
}

double w1n_energy(const SphereMap& u) {
  const int n = u.grid.dim;
  const int m = u.grid.size();
  std::function<Mat(const Vec&)> deriv;
  if (u.has_derivative()) {
    deriv = u.derivative;
  } else if (u.has_evaluator()) {
    // geodesic central differences in an orthonormal tangent frame
    auto eval = u.evaluator;
    deriv = [eval, n](const Vec& y) {
      const double h = 1e-5;
      Mat d(0, 0);
      std::vector<Vec> frame;
      if (n == 1) {
        frame.push_back(Vec{-y[1], y[0]});
      } else {
        Vec t1 = (std::fabs(y[2]) < 0.9) ? Vec{0, 0, 1} : Vec{1, 0, 0};
        t1 = (t1 - y.dot(t1) * y).normalized();
        const Vec t2{y[1] * t1[2] - y[2] * t1[1], y[2] * t1[0] - y[0] * t1[2],
                     y[0] * t1[1] - y[1] * t1[0]};
        frame = {t1, t2};
      }
      Mat out(eval(y).size(), y.size());
      for (const Vec& t : frame) {
        const Vec yp = (std::cos(h) * y + std::sin(h) * t).normalized();
        const Vec ym = (std::cos(h) * y - std::sin(h) * t).normalized();
        const Vec dv = (1.0 / (2 * h)) * (eval(yp) - eval(ym));
        out += outer(dv, t);
      }
      return out;
    };
  } else {
    throw std::invalid_argument("w1n_energy: map carries no derivative information");
  }

  auto term = [&](std::size_t i) {
    const Mat d = deriv(u.grid.nodes[i]) * tangent_projector(u.grid.nodes[i]);
    return u.grid.weights[i] * std::pow(operator_norm(d), n);
  };
  return par::sum_index(m, term);
}

}  // namespace hypext
