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
#include "empc/empc.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
  int workers = 0;
  bool print_config = false;
  bool print_report = false;
  std::vector<std::string> inputs;
};

int report_error(empc_status s) {
  std::fprintf(stderr, "empc: %s\n", empc_last_error());
  return static_cast<int>(s == EMPC_ERROR_ARGUMENT ? EMPC_ERROR_RUNTIME : s);
}

int run(const std::string &command, const Options &o) {
  empc_config *cfg = nullptr;
  empc_status s = o.config.empty() ? empc_config_default(&cfg)
                                   : empc_config_load(o.config.c_str(), &cfg);
  if (s != EMPC_OK)
    return report_error(s);

  std::vector<std::string> sets = o.sets;
  if (!o.out.empty())
    sets.push_back("output.dir=\"" + o.out + "\"");
  if (o.seed >= 0)
    sets.push_back("seed=" + std::to_string(o.seed));
  if (o.workers > 0)
    sets.push_back("sweep.workers=" + std::to_string(o.workers));
  for (const auto &a : sets) {
    if ((s = empc_config_set(cfg, a.c_str())) != EMPC_OK) {
      empc_config_free(cfg);
      return report_error(s);
    }
  }
  if (o.print_config)
    std::printf("%s\n", empc_config_json(cfg));

  std::vector<const char *> inputs;
  for (const auto &i : o.inputs)
    inputs.push_back(i.c_str());
  empc_result *res = nullptr;
  s = empc_run(cfg, command.c_str(), inputs.data(), inputs.size(), &res);
  empc_config_free(cfg);
  if (s != EMPC_OK)
    return report_error(s);

  std::fputs(empc_result_summary(res), stdout);
  if (o.print_report)
    std::printf("%s\n", empc_result_report_json(res));
  for (size_t i = 0; i < empc_result_output_count(res); ++i)
    std::printf("wrote %s\n", empc_result_output(res, i));
  const int code = empc_result_exit_code(res);
  empc_result_free(res);
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Economic MPC toolkit"};
  app.set_version_flag("--version", empc_version());
  app.require_subcommand(1);

  Options o;
  struct Entry {
    const char *name;
    const char *help;
  };
  const Entry entries[] = {
      {"steady", "Compute the optimal steady pair"},
      {"openloop", "Solve one open-loop problem at x0 and trace the solver"},
      {"closedloop", "Run a closed-loop simulation"},
      {"sweep", "Run a parameter sweep (closedloop or terminal-bound mode)"},
      {"check", "Run the invariant check suite"},
      {"plot-export", "Validate CSV logs and emit plot specs"},
  };
  std::string chosen;
  for (const auto &e : entries) {
    CLI::App *sub = app.add_subcommand(e.name, e.help);
    sub->add_option("-c,--config", o.config, "JSON config file")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", o.sets, "Override a key: section.key=value")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("-o,--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Sampling seed");
    sub->add_option("-j,--workers", o.workers, "Parallel sweep runs");
    sub->add_flag("--print-config", o.print_config,
                  "Print the resolved config first");
    sub->add_flag("--report", o.print_report, "Print the JSON report");
    if (std::string(e.name) == "plot-export")
      sub->add_option("inputs", o.inputs, "CSV files (default: scan --out)");
    sub->callback([&chosen, name = std::string(e.name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : EMPC_ERROR_CONFIG;
  }
  return run(chosen, o);
}
