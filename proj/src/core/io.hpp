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
#ifndef EMPC_IO_HPP
#define EMPC_IO_HPP

#include "analysis.hpp"
#include "controller.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace empc {

inline constexpr const char *kVersion = "1.0.0";

/// step, time, x0.., u0.., ell, delta, J_star, V_star, Psi_star,
/// delta_N_star, ell_N_star, iters, wall_ms
std::vector<std::string> closed_loop_columns(int state_dim, int control_dim);

void write_closed_loop_csv(const std::string &path, const ClosedLoopLog &log,
                           int state_dim, int control_dim);

/// A numeric CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string &name) const; // -1 when absent
};

CsvTable read_csv(const std::string &path);

/// Checks a table against the closed-loop column contract and returns the
/// state and control dimensions it implies.
std::pair<int, int> validate_closed_loop_table(const CsvTable &table);

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &rows);

void write_json(const std::string &path, const nlohmann::json &doc);

/// Run metadata: config echo, version, build and timing information.
nlohmann::json run_metadata(const nlohmann::json &config,
                            const std::string &command, double wall_seconds);

nlohmann::json to_json(const QuasiSteadyReport &r);
nlohmann::json to_json(const SteadyPair &p);

/// Creates the directory (and parents) or throws an Error.
void ensure_directory(const std::string &path);

} // namespace empc

#endif // EMPC_IO_HPP
