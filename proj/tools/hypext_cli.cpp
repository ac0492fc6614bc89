// Command-line front end: seminorm estimation, full extension runs with a
// JSON report and CSV exports, sphere scans, coverings, and the invariant
// verification suites.
//
// Exit codes: 0 pass, 1 audited-inequality failure, 2 configuration error,
// 3 pipeline abort.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypext/config.hpp"
#include "hypext/covering.hpp"
#include "hypext/pipeline.hpp"
#include "hypext/scanner.hpp"
#include "hypext/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hypext;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAuditFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string mobius;
  std::int64_t seed = -1;
};

RunConfig load_config(const CommonFlags& flags) {
  RunConfig cfg = flags.config_path.empty() ? RunConfig()
                                            : RunConfig::from_file(flags.config_path);
  if (flags.seed >= 0) cfg.pipeline.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.mode.empty()) cfg.pipeline.mode = flags.mode;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

Vec parse_vec(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() < 2 || vals.size() > 3)
    throw ConfigError("expected 2 or 3 comma-separated components: " + text);
  Vec v(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

json config_json(const RunConfig& cfg) {
  json j;
  std::istringstream in(cfg.serialize());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq - 1);
    const std::string val = line.substr(eq + 2);
    j[key] = val;
  }
  return j;
}

json ledger_json(const ConstantsLedger& led) {
  return json{{"n", led.n},
              {"mode", led.mode},
              {"fast_path", led.fast_path},
              {"seminorm", led.seminorm},
              {"w1n_energy", led.w1n},
              {"iota", led.iota},
              {"iota_effective", led.iota_eff},
              {"node_margin", led.node_margin},
              {"lipschitz", led.lipschitz},
              {"fast_path_bound", led.fast_path_bound},
              {"c1_seed", led.c1_seed},
              {"c1_measured", led.c1_measured},
              {"rho_formula", led.rho_formula},
              {"rho_doublings", led.rho_doublings},
              {"rho", led.rho},
              {"rho_bar", led.rho_bar},
              {"delta", led.delta},
              {"kappa", led.kappa},
              {"eta", led.eta},
              {"q_achieved", led.q_achieved},
              {"q_bound", led.q_bound},
              {"covering_centers", led.covering_centers},
              {"e_hyperbolic", led.e_hyperbolic},
              {"e_hyperbolic_se", led.e_hyperbolic_se},
              {"truncation_radius", led.truncation_radius},
              {"transfer_factor", led.transfer_factor},
              {"quasinorm_sup", led.quasinorm_sup},
              {"final_bound_log", led.final_bound_log},
              {"retries", led.retries}};
}

json report_json(const RunConfig& cfg, const ExtensionResult& result,
                 const AuditReport& audit, double seconds) {
  json j;
  j["config"] = config_json(cfg);
  j["ledger"] = ledger_json(result.ledger);
  j["distribution"] = json::array();
  for (const auto& s : result.distribution)
    j["distribution"].push_back(
        {{"lambda", s.lambda}, {"value", s.value}, {"std_error", s.std_error}});
  j["audits"] = json::array();
  for (const auto& row : audit.rows)
    j["audits"].push_back({{"name", row.name},
                           {"lhs", row.lhs},
                           {"rhs", row.rhs},
                           {"slack", row.slack},
                           {"mc_std_error", row.mc_se},
                           {"pass", row.pass}});
  j["stages"] = json::array();
  for (const auto& a : result.stage_audits)
    j["stages"].push_back({{"stage", a.stage},
                           {"singularities", a.singularities},
                           {"good_fraction", a.good_fraction},
                           {"singular_budget_lhs", a.singular_budget_lhs},
                           {"singular_budget_log_rhs", a.singular_budget_log_rhs},
                           {"regular_energy_lhs", a.regular_energy_lhs},
                           {"regular_energy_log_rhs", a.regular_energy_log_rhs},
                           {"pass_b", a.pass_b},
                           {"pass_c", a.pass_c}});
  j["improvements"] = json::array();
  for (const auto& rep : result.improvements) {
    json checks = json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"name", c.name},
                        {"lhs", c.lhs},
                        {"rhs", c.rhs},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass}});
    j["improvements"].push_back({{"rho_star", rep.rho_star},
                                 {"boundary_energy", rep.boundary_energy},
                                 {"admissible", rep.admissible_candidates},
                                 {"bad_fraction", rep.bad_fraction},
                                 {"checks", checks}});
  }
  j["singularities"] = json::array();
  for (const auto& p : result.singularities.points) {
    json coords = json::array();
    for (int i = 0; i < p.coords().size(); ++i) coords.push_back(p.coords()[i]);
    j["singularities"].push_back(coords);
  }
  j["invariants"] = {
      {"trace_pass", result.trace.pass},
      {"trace_max_final_deviation", result.trace.max_final_deviation},
      {"trace_threshold", result.trace.threshold},
      {"good_fraction_monotone", result.good_fraction_monotone},
      {"improvements_all_pass",
       [&] {
         for (const auto& rep : result.improvements)
           if (!rep.all_pass()) return false;
         return true;
       }()},
  };
  j["timings"] = {{"total_seconds", seconds}};
  return j;
}

std::string distribution_csv(const ExtensionResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda,lambda_pow_times_measure,std_error\n";
  for (const auto& s : result.distribution)
    os << s.lambda << "," << s.value << "," << s.std_error << "\n";
  return os.str();
}

int cmd_seminorm(const RunConfig& cfg, const std::string& mobius) {
  const SphereMap u = cfg.make_map();
  json j;
  j["config"] = config_json(cfg);
  std::ostringstream csv;
  csv.precision(17);
  csv << "level,nodes,value,excluded_mass_fraction\n";
  if (cfg.pipeline.mode == "w1n") {
    j["w1n_energy"] = w1n_energy(u);
    std::cout << "w1n energy = " << w1n_energy(u) << "\n";
  }
  double values[3];
  for (int level = 0; level < 3; ++level) {
    RunConfig scaled = cfg;
    if (cfg.n == 1) {
      scaled.grid_nodes = cfg.grid_nodes << level;
    } else {
      scaled.grid_lats = cfg.grid_lats << level;
      scaled.grid_lons = cfg.grid_lons << level;
    }
    const SphereMap ul = scaled.make_map();
    const GagliardoEstimate e = gagliardo_seminorm(ul);
    values[level] = e.value;
    if (e.cutoff_warning)
      std::cerr << "warning: diagonal cutoff excludes "
                << 100 * e.excluded_mass_fraction << "% of the pair mass\n";
    csv << level << "," << e.grid_resolution << "," << e.value << ","
        << e.excluded_mass_fraction << "\n";
    std::cout << "level " << level << " (" << e.grid_resolution
              << " nodes): seminorm = " << e.value << "\n";
  }
  j["seminorm_levels"] = {values[0], values[1], values[2]};
  if (!mobius.empty()) {
    const MobiusTransform t =
        MobiusTransform::translation(BallPoint(parse_vec(mobius)));
    const SphereMap ut = compose_with_mobius(u, t);
    const double before = gagliardo_seminorm(u).value;
    const double after = gagliardo_seminorm(ut).value;
    j["mobius_ratio"] = after / before;
    std::cout << "seminorm ratio after composing with the translation: "
              << after / before << "\n";
  }
  std::ostringstream map_csv;
  map_csv.precision(17);
  map_csv << "y1,y2,y3,u1,u2,u3\n";
  for (int i = 0; i < u.grid.size(); ++i) {
    const Vec& y = u.grid.nodes[i];
    const Vec& v = u.values[i];
    map_csv << y[0] << "," << y[1] << "," << (y.size() > 2 ? y[2] : 0.0) << ","
            << v[0] << "," << v[1] << "," << (v.size() > 2 ? v[2] : 0.0) << "\n";
  }
  write_file(fs::path(cfg.out_dir) / "map.csv", map_csv.str());
  write_file(fs::path(cfg.out_dir) / "convergence.csv", csv.str());
  write_file(fs::path(cfg.out_dir) / "seminorm.json", j.dump(2));
  return kExitPass;
}

int cmd_extend(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const SphereMap u = cfg.make_map();
  ExtensionResult result = cfg.pipeline.mode == "w1n"
                               ? extend_w1n(u, cfg.pipeline)
                               : extend(u, cfg.pipeline);
  const AuditReport audit = audit_estimates(result, cfg.pipeline);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const json j = report_json(cfg, result, audit, seconds);
  write_file(fs::path(cfg.out_dir) / "report.json", j.dump(2));
  write_file(fs::path(cfg.out_dir) / "distribution.csv", distribution_csv(result));

  bool invariants_pass = result.trace.pass && result.good_fraction_monotone;
  for (const auto& rep : result.improvements) {
    invariants_pass = invariants_pass && rep.all_pass();
    for (const auto& c : rep.checks)
      if (!c.pass)
        std::cerr << "improvement check failed: " << c.name
                  << " lhs=" << c.lhs << " rhs=" << c.rhs
                  << " tol=" << c.tolerance << "\n";
  }
  for (const auto& row : audit.rows)
    if (!row.pass)
      std::cerr << "audit failed: " << row.name << " lhs=" << row.lhs
                << " rhs=" << row.rhs << "\n";
  std::cout << (result.ledger.fast_path ? "fast path" : "full path")
            << "; Q = " << result.ledger.q_achieved
            << ", singularities = " << result.singularities.points.size()
            << ", quasinorm sup = " << result.ledger.quasinorm_sup << "\n";
  return (audit.all_pass() && invariants_pass) ? kExitPass : kExitAuditFail;
}

int cmd_scan(const RunConfig& cfg) {
  const SphereMap u = cfg.make_map();
  const HyperharmonicField field(u);
  const BallPoint center = cfg.scan_center.empty()
                               ? BallPoint::origin(cfg.n + 1)
                               : BallPoint(parse_vec(cfg.scan_center));
  const int samples = cfg.pipeline.sup_samples > 0 ? cfg.pipeline.sup_samples
                                                    : (cfg.n == 2 ? 512 : 256);
  const RadiusScan scan =
      scan_spheres(field, center, cfg.scan_min, cfg.scan_max,
                   cfg.pipeline.scan_step, samples, cfg.pipeline.seed);
  std::ostringstream csv;
  csv.precision(17);
  csv << "radius,sup_dist\n";
  for (std::size_t i = 0; i < scan.radii.size(); ++i)
    csv << scan.radii[i] << "," << scan.sup_dist[i] << "\n";
  write_file(fs::path(cfg.out_dir) / "scan.csv", csv.str());
  std::cout << "scanned " << scan.radii.size() << " spheres\n";
  return kExitPass;
}

int cmd_covering(const RunConfig& cfg) {
  const HyperbolicCovering cov = build_covering(
      cfg.n + 1, cfg.covering_region, cfg.covering_rho, cfg.pipeline.seed);
  std::ostringstream csv;
  csv.precision(17);
  csv << "x1,x2,x3,color\n";
  for (std::size_t i = 0; i < cov.centers.size(); ++i) {
    const Vec& c = cov.centers[i].coords();
    csv << c[0] << "," << c[1] << "," << (c.size() > 2 ? c[2] : 0.0) << ","
        << cov.color_of[i] << "\n";
  }
  write_file(fs::path(cfg.out_dir) / "covering.csv", csv.str());
  const bool q_ok = cov.num_colors() <= cov.color_count_bound();
  std::cout << cov.centers.size() << " centers, " << cov.num_colors()
            << " color classes (bound " << cov.color_count_bound() << ")\n";
  return (cov.coverage_verified && q_ok) ? kExitPass : kExitAuditFail;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  const auto suites = run_suites(suite, cfg.pipeline.seed);
  json j = json::array();
  bool all = true;
  for (const auto& s : suites) {
    json js{{"suite", s.suite}, {"seconds", s.seconds}, {"checks", json::array()}};
    for (const auto& c : s.checks) {
      js["checks"].push_back({{"name", c.name},
                              {"value", c.value},
                              {"bound", c.bound},
                              {"pass", c.pass}});
      std::cout << (c.pass ? "PASS " : "FAIL ") << s.suite << "/" << c.name
                << "  value=" << c.value << " bound=" << c.bound << "\n";
      all = all && c.pass;
    }
    j.push_back(js);
  }
  write_file(fs::path(cfg.out_dir) / "verify.json", j.dump(2));
  return all ? kExitPass : kExitAuditFail;
}

int cmd_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open report '" << path << "'\n";
    return kExitConfig;
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::cerr << "malformed report: " << e.what() << "\n";
    return kExitConfig;
  }
  for (const char* key : {"config", "ledger", "distribution", "audits",
                          "invariants", "timings"})
    if (!j.contains(key)) {
      std::cerr << "report is missing the '" << key << "' section\n";
      return kExitConfig;
    }
  bool pass = true;
  for (const auto& row : j["audits"]) {
    if (!row["pass"].get<bool>()) {
      pass = false;
      std::cout << "FAIL " << row["name"].get<std::string>() << "\n";
    }
  }
  for (auto& [key, value] : j["invariants"].items())
    if (value.is_boolean() && !value.get<bool>()) {
      pass = false;
      std::cout << "FAIL invariant " << key << "\n";
    }
  std::cout << (pass ? "report: all audits pass\n" : "report: failures present\n");
  return pass ? kExitPass : kExitAuditFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular extensions of sphere-valued maps on the Poincare ball"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string suite = "all";
  std::string report_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "config file (key = value)");
    cmd->add_option("--seed", flags.seed, "root RNG seed");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--mode", flags.mode, "gagliardo | w1n");
  };

  CLI::App* seminorm = app.add_subcommand("seminorm", "seminorm with a convergence table");
  add_common(seminorm);
  seminorm->add_option("--mobius", flags.mobius,
                       "also report the seminorm ratio after composing with "
                       "the translation by this center");

  CLI::App* extend_cmd = app.add_subcommand("extend", "full extension run");
  add_common(extend_cmd);

  CLI::App* scan = app.add_subcommand("scan-spheres", "radius scan of sup distances");
  add_common(scan);

  CLI::App* covering = app.add_subcommand("covering", "build and audit a covering");
  add_common(covering);

  CLI::App* verify = app.add_subcommand("verify", "invariant verification suites");
  add_common(verify);
  verify->add_option("--suite", suite,
                     "mobius | kernel | covariance | radial-exact | weak-type "
                     "| covering | all");

  CLI::App* report = app.add_subcommand("report", "validate an existing report.json");
  report->add_option("path", report_path, "report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) return cmd_report(report_path);
    const RunConfig cfg = load_config(flags);
    if (seminorm->parsed()) return cmd_seminorm(cfg, flags.mobius);
    if (extend_cmd->parsed()) return cmd_extend(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (covering->parsed()) return cmd_covering(cfg);
    if (verify->parsed()) return cmd_verify(cfg, suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PipelineAbort& e) {
    std::cerr << "pipeline abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitConfig;
}
