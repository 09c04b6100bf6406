/*
 Copyright 2026 The empc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "config.hpp"
#include "io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace empc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("empc_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

} // namespace

TEST_CASE("default configuration describes the CSTR benchmark") {
  const RunConfig c = parse_config(default_config_document());
  CHECK(c.model_name == "cstr");
  CHECK(c.stage_cost == "neg_x2");
  CHECK(c.controller.horizon == 20);
  CHECK(c.controller.alpha == 0.01);
  CHECK(c.controller.gamma == 0.001);
  CHECK(c.controller.tau_pred == 0.1);
  REQUIRE(c.controller.x0.size() == 3);
  CHECK(c.controller.x0[0] == 0.5);
  const Problem p = build_problem(c);
  CHECK(p.bounds.lower[0] == 0.049);
  CHECK(p.bounds.upper[0] == 0.449);
  CHECK(p.predictor.substeps() == 20);
  CHECK(p.plant.substeps() == 100);
}

TEST_CASE("unknown keys and bad values are configuration errors") {
  json doc = default_config_document();
  doc["controller"]["horizn"] = 3;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = default_config_document();
  doc["model"]["name"] = "";
  CHECK_THROWS_AS(build_problem(parse_config(doc)), ConfigError);
  doc = default_config_document();
  doc["controller"]["horizon"] = "twenty";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = default_config_document();
  doc["objective"]["alpha"] = -1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("dotted overrides") {
  json doc = default_config_document();
  apply_override(doc, "objective.alpha=0.5");
  apply_override(doc, "model.name=linear-test");
  apply_override(doc, "controller.x0=[0.25]");
  apply_override(doc, "controller.duration=3");
  const RunConfig c = parse_config(doc);
  CHECK(c.controller.alpha == 0.5);
  CHECK(c.model_name == "linear-test");
  CHECK(c.stage_cost == "quadratic");
  CHECK(c.controller.x0[0] == 0.25);
  CHECK(c.controller.steps == 30);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
  apply_override(doc, "controller.duration=null");
  CHECK(doc["controller"]["duration"].is_null());
}

TEST_CASE("sweep pairs and configuration files") {
  const fs::path dir = scratch("config");
  const fs::path file = dir / "c.json";
  std::ofstream(file) << R"({
    // two weight pairs
    "sweep": {"pairs": [[0, 0], [0.01, 0.001]], "tau_plants": [0.1, 0.02]},
    "controller": {"steps": 4}
  })";
  const RunConfig c = load_config(file.string());
  REQUIRE(c.sweep.pairs.size() == 2);
  CHECK(c.sweep.pairs[1].first == 0.01);
  CHECK(c.sweep.pairs[1].second == 0.001);
  CHECK(c.sweep.tau_plants.size() == 2);
  CHECK(c.controller.steps == 4);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("closed-loop CSV round trip") {
  const fs::path dir = scratch("csv");
  ClosedLoopLog log;
  for (int k = 0; k < 3; ++k) {
    LogEntry e;
    e.step = k;
    e.time = 0.1 * k;
    e.x = Eigen::Vector3d(0.1 * k, 1.0 / 3.0, 0.2);
    e.u = Vector::Constant(1, 0.149);
    e.ell = -1.0 / 3.0;
    e.iterations = k;
    log.entries.push_back(e);
  }
  const std::string path = (dir / "cl.csv").string();
  write_closed_loop_csv(path, log, 3, 1);
  const CsvTable t = read_csv(path);
  CHECK(t.header == closed_loop_columns(3, 1));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[2][t.column("time")] == 0.1 * 2);
  CHECK(t.rows[1][t.column("x1")] == 1.0 / 3.0);
  CHECK(t.rows[2][t.column("iters")] == 2);
  CHECK(t.column("nope") == -1);
  const auto dims = validate_closed_loop_table(t);
  CHECK(dims.first == 3);
  CHECK(dims.second == 1);

  CsvTable broken = t;
  broken.header[3] = "zz";
  CHECK_THROWS_AS(validate_closed_loop_table(broken), ConfigError);
}

TEST_CASE("run metadata echoes the configuration") {
  const json doc = default_config_document();
  const json meta = run_metadata(doc, "closedloop", 1.5);
  CHECK(meta["command"] == "closedloop");
  CHECK(meta["version"] == kVersion);
  CHECK(meta["config"] == doc);
  CHECK(meta["wall_seconds"] == 1.5);
}
