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
#include "io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace empc {

namespace {

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> vec(const Vector &v) {
  return {v.data(), v.data() + v.size()};
}

} // namespace

std::vector<std::string> closed_loop_columns(int n, int m) {
  std::vector<std::string> cols{"step", "time"};
  for (int i = 0; i < n; ++i)
    cols.push_back("x" + std::to_string(i));
  for (int j = 0; j < m; ++j)
    cols.push_back("u" + std::to_string(j));
  for (const char *c : {"ell", "delta", "J_star", "V_star", "Psi_star",
                        "delta_N_star", "ell_N_star", "iters", "wall_ms"})
    cols.emplace_back(c);
  return cols;
}

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &rows) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto &row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << num(row[i]);
    out << '\n';
  }
  if (!out)
    throw Error("write failed for '" + path + "'");
}

void write_closed_loop_csv(const std::string &path, const ClosedLoopLog &log,
                           int n, int m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(log.size());
  for (const LogEntry &e : log.entries) {
    std::vector<double> r{static_cast<double>(e.step), e.time};
    for (double v : vec(e.x))
      r.push_back(v);
    for (double v : vec(e.u))
      r.push_back(v);
    for (double v : {e.ell, e.delta, e.j_star, e.v_star, e.psi_star,
                     e.delta_n_star, e.ell_n_star,
                     static_cast<double>(e.iterations), e.wall_ms})
      r.push_back(v);
    rows.push_back(std::move(r));
  }
  write_csv(path, closed_loop_columns(n, m), rows);
}

int CsvTable::column(const std::string &name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("'" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      t.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size())
          throw std::invalid_argument(cell);
      } catch (const std::exception &) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.header.size())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected " + std::to_string(t.header.size()) +
                        " cells");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::pair<int, int> validate_closed_loop_table(const CsvTable &t) {
  int n = 0, m = 0;
  while (t.column("x" + std::to_string(n)) >= 0)
    ++n;
  while (t.column("u" + std::to_string(m)) >= 0)
    ++m;
  if (n == 0 || m == 0 || t.header != closed_loop_columns(n, m))
    throw ConfigError("CSV header does not match the closed-loop column "
                      "contract");
  return {n, m};
}

void write_json(const std::string &path, const nlohmann::json &doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out)
    throw Error("write failed for '" + path + "'");
}

nlohmann::json run_metadata(const nlohmann::json &config,
                            const std::string &command, double wall_seconds) {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::json meta;
  meta["command"] = command;
  meta["version"] = kVersion;
  meta["finished_at"] = stamp;
  meta["wall_seconds"] = wall_seconds;
  meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                  std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
#if defined(__clang__)
  meta["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  meta["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  meta["config"] = config;
  return meta;
}

nlohmann::json to_json(const QuasiSteadyReport &r) {
  nlohmann::json j{{"eps_ell", r.eps_ell},
                   {"eps_delta", r.eps_delta},
                   {"tail_start", r.tail_start},
                   {"tail_length", r.tail_length},
                   {"stationary", r.stationary},
                   {"tail_distance", r.tail_distance},
                   {"steps_to_threshold", r.steps_to_threshold},
                   {"descent_violations", r.descent_violations}};
  j["descent_slack"] =
      r.descent_slack ? nlohmann::json(*r.descent_slack) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const SteadyPair &p) {
  return {{"x_s", vec(p.x_s)},          {"u_s", vec(p.u_s)},
          {"ell_s", p.ell_s},           {"residual", p.residual},
          {"skipped_points", p.skipped_points}, {"warnings", p.warnings}};
}

void ensure_directory(const std::string &path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw Error("cannot create directory '" + path + "': " + ec.message());
}

} // namespace empc
