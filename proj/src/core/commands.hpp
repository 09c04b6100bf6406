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
#ifndef EMPC_COMMANDS_HPP
#define EMPC_COMMANDS_HPP

#include "config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace empc {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitRuntime = 2,
  kExitCheckFailed = 3,
};

struct CommandResult {
  int exit_code = kExitOk;
  // Human-readable report.
  std::string summary;
  nlohmann::json report;
  std::vector<std::string> outputs;
};

std::vector<std::string> command_names();

/// Runs one subcommand. Config errors and runtime failures are thrown;
/// check failures and aborted runs are reported through exit_code.
/// `inputs` lists CSV files for plot-export; other commands ignore it.
CommandResult run_command(const RunConfig &cfg, const std::string &command,
                          const std::vector<std::string> &inputs = {});

/// Same, but maps exceptions to exit codes and messages.
CommandResult run_command_safely(const RunConfig &cfg,
                                 const std::string &command,
                                 const std::vector<std::string> &inputs = {});

CommandResult cmd_steady(const RunConfig &cfg);
CommandResult cmd_openloop(const RunConfig &cfg);
CommandResult cmd_closedloop(const RunConfig &cfg);
CommandResult cmd_sweep(const RunConfig &cfg);
CommandResult cmd_check(const RunConfig &cfg);
CommandResult cmd_plot_export(const RunConfig &cfg,
                              const std::vector<std::string> &inputs);

/// Individual checks of the invariant suite.
struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json data;
};

CheckItem check_gradients(const RunConfig &cfg, const Problem &p);
CheckItem check_shift_invariance(const RunConfig &cfg, const Problem &p);
CheckItem check_brute_force(const RunConfig &cfg, const Problem &p);
CheckItem check_lemma_scan(const RunConfig &cfg, const Problem &p,
                           const SteadyPair &steady);

/// Sampling box for the lemma scan as configured.
std::pair<Vector, Vector> lemma_box(const RunConfig &cfg, const Problem &p,
                                    const SteadyPair &steady);

/// Output of one closed-loop run, shared by closedloop and sweep.
struct ClosedLoopRun {
  ClosedLoopLog log;
  std::optional<SteadyPair> steady;
  std::optional<QuasiSteadyReport> quasi;
  std::string steady_error;
  double wall_seconds = 0.0;
};

ClosedLoopRun run_closed_loop(const RunConfig &cfg);

} // namespace empc

#endif // EMPC_COMMANDS_HPP
