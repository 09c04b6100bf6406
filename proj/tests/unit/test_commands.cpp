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
#include "commands.hpp"
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
  const fs::path p = fs::temp_directory_path() / ("empc_cmd_" + name);
  fs::remove_all(p);
  return p;
}

json base_doc(const fs::path &out, int steps) {
  json doc = default_config_document();
  doc["controller"]["steps"] = steps;
  doc["output"]["dir"] = out.string();
  return doc;
}

// Table contents without the timing column.
std::vector<std::vector<double>> without_wall(const CsvTable &t) {
  const int w = t.column("wall_ms");
  std::vector<std::vector<double>> rows;
  for (auto row : t.rows) {
    row.erase(row.begin() + w);
    rows.push_back(row);
  }
  return rows;
}

} // namespace

TEST_CASE("steady command writes the pair") {
  const fs::path out = scratch("steady");
  const CommandResult r = run_command(parse_config(base_doc(out, 1)), "steady");
  CHECK(r.exit_code == kExitOk);
  CHECK(fs::exists(out / "steady.json"));
  CHECK(std::abs(r.report["u_s"][0].get<double>() - 0.149) <= 1e-3);
}

TEST_CASE("closed loop with one step writes one row") {
  const fs::path out = scratch("one");
  const CommandResult r =
      run_command(parse_config(base_doc(out, 1)), "closedloop");
  CHECK(r.exit_code == kExitOk);
  const CsvTable t = read_csv((out / "closedloop.csv").string());
  CHECK(t.rows.size() == 1);
  CHECK(t.header == closed_loop_columns(3, 1));
  CHECK(fs::exists(out / "closedloop.meta.json"));
}

TEST_CASE("single-point sweep equals the matching closed-loop run") {
  const fs::path a = scratch("direct"), b = scratch("sweep");
  run_command(parse_config(base_doc(a, 4)), "closedloop");
  json doc = base_doc(b, 4);
  doc["sweep"]["alphas"] = {0.01};
  doc["sweep"]["gammas"] = {0.001};
  const CommandResult r = run_command(parse_config(doc), "sweep");
  CHECK(r.exit_code == kExitOk);
  REQUIRE(fs::exists(b / "sweep.csv"));
  const CsvTable direct = read_csv((a / "closedloop.csv").string());
  const CsvTable swept =
      read_csv((b / "a0.01_g0.001_t0.1" / "closedloop.csv").string());
  CHECK(without_wall(direct) == without_wall(swept));
}

TEST_CASE("invariant checks pass on the scalar test model") {
  const fs::path out = scratch("check");
  json doc = base_doc(out, 1);
  doc["model"]["name"] = "linear-test";
  doc["controller"]["horizon"] = 5;
  doc["check"]["gradient_probes"] = 20;
  doc["check"]["lemma"] = false;
  const CommandResult r = run_command(parse_config(doc), "check");
  INFO(r.summary);
  CHECK(r.exit_code == kExitOk);
  CHECK(fs::exists(out / "check.json"));

  doc["check"]["fd_step"] = 0.3;
  const CommandResult bad = run_command(parse_config(doc), "check");
  CHECK(bad.exit_code == kExitCheckFailed);
}

TEST_CASE("errors map to exit codes") {
  const fs::path out = scratch("errors");
  json doc = base_doc(out, 1);
  doc["model"]["name"] = "nope";
  CHECK_THROWS_AS(build_problem(parse_config(doc)), ConfigError);

  doc = base_doc(out, 1);
  doc["model"]["name"] = "integrator";
  doc["bounds"] = {{"lower", {0.2}}, {"upper", {1.0}}};
  const CommandResult r = run_command_safely(parse_config(doc), "steady");
  CHECK(r.exit_code == kExitRuntime);
  CHECK(!r.summary.empty());

  CHECK(run_command_safely(parse_config(base_doc(out, 1)), "frobnicate")
            .exit_code == kExitConfig);
}

TEST_CASE("plot export validates inputs and writes specs") {
  const fs::path out = scratch("plots");
  const RunConfig cfg = parse_config(base_doc(out, 2));
  CHECK(run_command_safely(cfg, "plot-export").exit_code == kExitConfig);
  run_command(cfg, "closedloop");
  const CommandResult r = run_command(cfg, "plot-export");
  CHECK(r.exit_code == kExitOk);
  REQUIRE(fs::exists(out / "plots" / "specs.json"));

  std::ofstream(out / "bad.csv") << "a,b\n1,2\n";
  CHECK(run_command_safely(cfg, "plot-export", {(out / "bad.csv").string()})
            .exit_code == kExitConfig);
}
