#pragma once

#include <string>
#include <vector>

#include "hypext/pipeline.hpp"

namespace hypext {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key = value run configuration; flags override file entries.
struct RunConfig {
  int n = 1;
  std::string target = "circle";  // circle | sphere | ellipse
  double ellipse_a = 2.0, ellipse_b = 1.0;
  std::string map = "degree:1";
  int grid_nodes = 512;   // n = 1
  int grid_lats = 24, grid_lons = 48;  // n = 2
  std::string out_dir = ".";
  PipelineConfig pipeline;

  // scan / covering front-end knobs
  std::string scan_center = "";   // empty = origin, else "x1,x2[,x3]"
  double scan_min = 0.05, scan_max = 4.0;
  double covering_region = 3.0, covering_rho = 0.5;

  void set(const std::string& key, const std::string& value);
  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
  std::string serialize() const;

  void validate() const;

  SphereGrid make_grid() const;
  ManifoldTarget make_target() const;
  SphereMap make_map() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace hypext
