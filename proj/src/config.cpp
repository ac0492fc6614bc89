#include "hypext/config.hpp"

#include <fstream>
#include <sstream>

namespace hypext {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "n") {
      n = std::stoi(value);
    } else if (key == "target") {
      target = value;
    } else if (key == "ellipse_a") {
      ellipse_a = std::stod(value);
    } else if (key == "ellipse_b") {
      ellipse_b = std::stod(value);
    } else if (key == "map") {
      map = value;
    } else if (key == "grid") {
      const auto x = value.find('x');
      if (x == std::string::npos) {
        grid_nodes = std::stoi(value);
      } else {
        grid_lats = std::stoi(value.substr(0, x));
        grid_lons = std::stoi(value.substr(x + 1));
      }
    } else if (key == "out_dir") {
      out_dir = value;
    } else if (key == "iota") {
      pipeline.iota = std::stod(value);
    } else if (key == "mode") {
      pipeline.mode = value;
    } else if (key == "seed") {
      pipeline.seed = std::stoull(value);
    } else if (key == "c1_seed") {
      pipeline.c1_seed = std::stod(value);
    } else if (key == "cw_seed") {
      pipeline.cw_seed = std::stod(value);
    } else if (key == "scan_step") {
      pipeline.scan_step = std::stod(value);
    } else if (key == "sup_samples") {
      pipeline.sup_samples = std::stoi(value);
    } else if (key == "verify_centers") {
      pipeline.verify_centers = std::stoi(value);
    } else if (key == "rho_cap") {
      pipeline.rho_cap = std::stod(value);
    } else if (key == "radius_candidates") {
      pipeline.radius_candidates = std::stoi(value);
    } else if (key == "boundary_quad_samples") {
      pipeline.boundary_quad_samples = std::stoi(value);
    } else if (key == "mc_energy_samples") {
      pipeline.mc_energy_samples = std::stoi(value);
    } else if (key == "mc_ball_samples") {
      pipeline.mc_ball_samples = std::stoi(value);
    } else if (key == "mc_stage_samples") {
      pipeline.mc_stage_samples = std::stoi(value);
    } else if (key == "mc_distribution_samples") {
      pipeline.mc_distribution_samples = std::stoi(value);
    } else if (key == "good_fraction_samples") {
      pipeline.good_fraction_samples = std::stoi(value);
    } else if (key == "lambda_min") {
      pipeline.lambda_min = std::stod(value);
    } else if (key == "lambda_max") {
      pipeline.lambda_max = std::stod(value);
    } else if (key == "lambda_count") {
      pipeline.lambda_count = std::stoi(value);
    } else if (key == "trace_points") {
      pipeline.trace_points = std::stoi(value);
    } else if (key == "max_retries") {
      pipeline.max_retries = std::stoi(value);
    } else if (key == "scan_center") {
      scan_center = value;
    } else if (key == "scan_min") {
      scan_min = std::stod(value);
    } else if (key == "scan_max") {
      scan_max = std::stod(value);
    } else if (key == "covering_region") {
      covering_region = std::stod(value);
    } else if (key == "covering_rho") {
      covering_rho = std::stod(value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad value for config key '" + key + "': " + value);
  }
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value, got '" + line + "'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "n = " << n << "\n";
  os << "target = " << target << "\n";
  os << "ellipse_a = " << ellipse_a << "\n";
  os << "ellipse_b = " << ellipse_b << "\n";
  os << "map = " << map << "\n";
  if (n == 1)
    os << "grid = " << grid_nodes << "\n";
  else
    os << "grid = " << grid_lats << "x" << grid_lons << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "iota = " << pipeline.iota << "\n";
  os << "mode = " << pipeline.mode << "\n";
  os << "seed = " << pipeline.seed << "\n";
  os << "c1_seed = " << pipeline.c1_seed << "\n";
  os << "cw_seed = " << pipeline.cw_seed << "\n";
  os << "scan_step = " << pipeline.scan_step << "\n";
  os << "sup_samples = " << pipeline.sup_samples << "\n";
  os << "verify_centers = " << pipeline.verify_centers << "\n";
  os << "rho_cap = " << pipeline.rho_cap << "\n";
  os << "radius_candidates = " << pipeline.radius_candidates << "\n";
  os << "boundary_quad_samples = " << pipeline.boundary_quad_samples << "\n";
  os << "mc_energy_samples = " << pipeline.mc_energy_samples << "\n";
  os << "mc_ball_samples = " << pipeline.mc_ball_samples << "\n";
  os << "mc_stage_samples = " << pipeline.mc_stage_samples << "\n";
  os << "mc_distribution_samples = " << pipeline.mc_distribution_samples << "\n";
  os << "good_fraction_samples = " << pipeline.good_fraction_samples << "\n";
  os << "lambda_min = " << pipeline.lambda_min << "\n";
  os << "lambda_max = " << pipeline.lambda_max << "\n";
  os << "lambda_count = " << pipeline.lambda_count << "\n";
  os << "trace_points = " << pipeline.trace_points << "\n";
  os << "max_retries = " << pipeline.max_retries << "\n";
  if (!scan_center.empty()) os << "scan_center = " << scan_center << "\n";
  os << "scan_min = " << scan_min << "\n";
  os << "scan_max = " << scan_max << "\n";
  os << "covering_region = " << covering_region << "\n";
  os << "covering_rho = " << covering_rho << "\n";
  return os.str();
}

void RunConfig::validate() const {
  if (n != 1 && n != 2) throw ConfigError("n must be 1 or 2");
  if (target != "circle" && target != "sphere" && target != "ellipse")
    throw ConfigError("target must be circle, sphere or ellipse");
  if (pipeline.mode != "gagliardo" && pipeline.mode != "w1n")
    throw ConfigError("mode must be gagliardo or w1n");
  if (pipeline.iota <= 0) throw ConfigError("iota must be positive");
  if (pipeline.lambda_count < 2) throw ConfigError("lambda_count must be >= 2");
  if (pipeline.mc_distribution_samples <= 0 || pipeline.mc_energy_samples <= 0 ||
      pipeline.sup_samples < 0 || pipeline.radius_candidates <= 0)
    throw ConfigError("sample counts must be positive");
  MapDescriptor::parse(map);  // throws on malformed descriptors
}

SphereGrid RunConfig::make_grid() const {
  return n == 1 ? SphereGrid::circle(grid_nodes)
                : SphereGrid::sphere(grid_lats, grid_lons);
}

ManifoldTarget RunConfig::make_target() const {
  if (target == "circle") return ManifoldTarget::circle();
  if (target == "sphere") return ManifoldTarget::sphere();
  return ManifoldTarget::ellipse(ellipse_a, ellipse_b);
}

SphereMap RunConfig::make_map() const {
  return make_test_map(MapDescriptor::parse(map), make_grid(), make_target());
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.serialize() == b.serialize();
}

}  // namespace hypext
