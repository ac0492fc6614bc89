#include <doctest.h>

#include "hypext/config.hpp"

using namespace hypext;

TEST_CASE("config round-trips through serialization") {
  RunConfig cfg;
  cfg.n = 2;
  cfg.grid_lats = 16;
  cfg.grid_lons = 32;
  cfg.map = "sphere-degree:2";
  cfg.target = "sphere";
  cfg.pipeline.iota = 0.25;
  cfg.pipeline.seed = 987654321;
  cfg.pipeline.lambda_min = 0.5;
  const RunConfig back = RunConfig::from_string(cfg.serialize());
  CHECK(back == cfg);
  CHECK(back.pipeline.seed == 987654321);
}

TEST_CASE("config errors carry line context") {
  try {
    RunConfig::from_string("n = 1\nbogus line\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::from_string("unknown_key = 3\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("iota = banana\n"), ConfigError);
}

TEST_CASE("validation catches inconsistent settings") {
  RunConfig cfg;
  cfg.n = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.n = 1;
  cfg.pipeline.mode = "mystery";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.pipeline.mode = "gagliardo";
  cfg.map = "degree:two";
  CHECK_THROWS(cfg.validate());
  cfg.map = "degree:2";
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("comments and whitespace are tolerated") {
  const RunConfig cfg = RunConfig::from_string(
      "# full line comment\n  n = 1   # trailing\n\nmap = degree:3\n");
  CHECK(cfg.n == 1);
  CHECK(cfg.map == "degree:3");
}

TEST_CASE("config builds maps and grids") {
  RunConfig cfg;
  cfg.map = "ellipse:2,1,1";
  cfg.target = "ellipse";
  const SphereMap u = cfg.make_map();
  CHECK(u.target.name() == "ellipse");
  CHECK(u.target_valued());
}
