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

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"

#include <optional>
#include <string>
#include <vector>

struct empc_config {
  nlohmann::json document;
  empc::RunConfig resolved;
  std::string json_text;
};

struct empc_problem {
  empc::RunConfig cfg;
  empc::Problem problem;
};

struct empc_log {
  empc::ClosedLoopLog log;
  std::vector<std::string> columns;
  int n = 0;
  int m = 0;
};

struct empc_result {
  empc::CommandResult result;
  std::string report_text;
};

namespace {

thread_local std::string last_error;

empc_status fail(empc_status code, const std::string &msg) {
  last_error = msg;
  return code;
}

template <typename F> empc_status guarded(F &&f) {
  try {
    last_error.clear();
    f();
    return EMPC_OK;
  } catch (const empc::ConfigError &e) {
    return fail(EMPC_ERROR_CONFIG, e.what());
  } catch (const std::exception &e) {
    return fail(EMPC_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(EMPC_ERROR_RUNTIME, "unknown error");
  }
}

empc_status make_config(nlohmann::json doc, empc_config **out) {
  if (!out)
    return fail(EMPC_ERROR_ARGUMENT, "null output pointer");
  return guarded([&] {
    auto *c = new empc_config{doc, empc::parse_config(doc), {}};
    *out = c;
  });
}

empc::Vector view(const double *p, int n) {
  return Eigen::Map<const empc::Vector>(p, n);
}

} // namespace

extern "C" {

const char *empc_version(void) { return empc::kVersion; }

const char *empc_last_error(void) { return last_error.c_str(); }

empc_status empc_config_default(empc_config **out) {
  return make_config(nlohmann::json::object(), out);
}

empc_status empc_config_load(const char *path, empc_config **out) {
  if (!path)
    return fail(EMPC_ERROR_ARGUMENT, "null path");
  nlohmann::json doc;
  const empc_status s = guarded([&] {
    doc = empc::load_config(path).document;
  });
  return s == EMPC_OK ? make_config(std::move(doc), out) : s;
}

empc_status empc_config_parse(const char *json_text, empc_config **out) {
  if (!json_text)
    return fail(EMPC_ERROR_ARGUMENT, "null text");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error &e) {
    return fail(EMPC_ERROR_CONFIG, std::string("config: ") + e.what());
  }
  return make_config(std::move(doc), out);
}

empc_status empc_config_set(empc_config *cfg, const char *assignment) {
  if (!cfg || !assignment)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    nlohmann::json doc = cfg->document;
    empc::apply_override(doc, assignment);
    cfg->resolved = empc::parse_config(doc);
    cfg->document = std::move(doc);
  });
}

const char *empc_config_json(empc_config *cfg) {
  if (!cfg)
    return "";
  cfg->json_text = cfg->resolved.document.dump(2);
  return cfg->json_text.c_str();
}

void empc_config_free(empc_config *cfg) { delete cfg; }

empc_status empc_run(const empc_config *cfg, const char *command,
                     const char *const *inputs, size_t n_inputs,
                     empc_result **out) {
  if (!cfg || !command || !out || (n_inputs && !inputs))
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::string> files(inputs, inputs + n_inputs);
    auto *r = new empc_result;
    try {
      r->result = empc::run_command(cfg->resolved, command, files);
    } catch (...) {
      delete r;
      throw;
    }
    r->report_text = r->result.report.dump(2);
    *out = r;
  });
}

int empc_result_exit_code(const empc_result *r) {
  return r ? r->result.exit_code : EMPC_ERROR_ARGUMENT;
}

const char *empc_result_summary(const empc_result *r) {
  return r ? r->result.summary.c_str() : "";
}

const char *empc_result_report_json(const empc_result *r) {
  return r ? r->report_text.c_str() : "";
}

size_t empc_result_output_count(const empc_result *r) {
  return r ? r->result.outputs.size() : 0;
}

const char *empc_result_output(const empc_result *r, size_t i) {
  if (!r || i >= r->result.outputs.size())
    return nullptr;
  return r->result.outputs[i].c_str();
}

void empc_result_free(empc_result *r) { delete r; }

empc_status empc_problem_create(const empc_config *cfg, empc_problem **out) {
  if (!cfg || !out)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new empc_problem{cfg->resolved, empc::build_problem(cfg->resolved)};
  });
}

void empc_problem_free(empc_problem *p) { delete p; }

int empc_problem_state_dim(const empc_problem *p) {
  return p ? p->problem.predictor.state_dim() : 0;
}

int empc_problem_control_dim(const empc_problem *p) {
  return p ? p->problem.predictor.control_dim() : 0;
}

int empc_problem_horizon(const empc_problem *p) {
  return p ? p->cfg.controller.horizon : 0;
}

empc_status empc_problem_step(const empc_problem *p, const double *x,
                              const double *u, double *x_next) {
  if (!p || !x || !u || !x_next)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const int n = p->problem.predictor.state_dim();
    const int m = p->problem.predictor.control_dim();
    const empc::Vector next = p->problem.predictor.step(view(x, n), view(u, m));
    std::copy(next.data(), next.data() + n, x_next);
  });
}

empc_status empc_problem_steady_pair(const empc_problem *p, double *x_s,
                                     double *u_s, double *ell_s,
                                     double *residual) {
  if (!p)
    return fail(EMPC_ERROR_ARGUMENT, "null problem");
  return guarded([&] {
    const empc::SteadyPair s = empc::optimal_steady_pair(
        p->problem.predictor, p->problem.objective, p->problem.bounds,
        p->cfg.steady);
    if (x_s)
      std::copy(s.x_s.data(), s.x_s.data() + s.x_s.size(), x_s);
    if (u_s)
      std::copy(s.u_s.data(), s.u_s.data() + s.u_s.size(), u_s);
    if (ell_s)
      *ell_s = s.ell_s;
    if (residual)
      *residual = s.residual;
  });
}

empc_status empc_problem_solve(const empc_problem *p, const double *x0,
                               const double *warm, double *useq_out,
                               double *cost_out, int *iterations,
                               int *converged) {
  if (!p || !x0)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const int n = p->problem.predictor.state_dim();
    const int m = p->problem.predictor.control_dim();
    const int horizon = p->cfg.controller.horizon;
    empc::ControlSequence start;
    if (warm) {
      start = empc::ControlSequence(
          Eigen::Map<const empc::Matrix>(warm, m, horizon + 1),
          p->problem.bounds);
    } else {
      const empc::Vector u0 = p->cfg.controller.cold_start.size()
                                  ? p->cfg.controller.cold_start
                                  : p->problem.bounds.midpoint();
      start = empc::ControlSequence::constant(horizon, u0, p->problem.bounds);
    }
    const empc::SolveResult r =
        empc::solve(p->problem.predictor, p->problem.objective, view(x0, n),
                    start, p->cfg.controller.solver);
    if (useq_out) {
      const empc::Vector z = r.useq.stacked();
      std::copy(z.data(), z.data() + z.size(), useq_out);
    }
    if (cost_out)
      *cost_out = r.cost.total;
    if (iterations)
      *iterations = r.iterations;
    if (converged)
      *converged = r.converged ? 1 : 0;
  });
}

empc_status empc_problem_simulate(const empc_problem *p, empc_log **out) {
  if (!p || !out)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const empc::Controller c(p->problem.predictor, p->problem.objective,
                             p->problem.bounds, p->cfg.controller);
    auto *log = new empc_log;
    log->log = empc::simulate(c, p->problem.plant);
    log->n = p->problem.predictor.state_dim();
    log->m = p->problem.predictor.control_dim();
    log->columns = empc::closed_loop_columns(log->n, log->m);
    *out = log;
  });
}

size_t empc_log_rows(const empc_log *log) { return log ? log->log.size() : 0; }

size_t empc_log_columns(const empc_log *log) {
  return log ? log->columns.size() : 0;
}

const char *empc_log_column_name(const empc_log *log, size_t j) {
  if (!log || j >= log->columns.size())
    return nullptr;
  return log->columns[j].c_str();
}

empc_status empc_log_row(const empc_log *log, size_t i, double *row) {
  if (!log || !row)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  if (i >= log->log.size())
    return fail(EMPC_ERROR_ARGUMENT, "row index out of range");
  const empc::LogEntry &e = log->log.entries[i];
  double *p = row;
  *p++ = e.step;
  *p++ = e.time;
  p = std::copy(e.x.data(), e.x.data() + e.x.size(), p);
  p = std::copy(e.u.data(), e.u.data() + e.u.size(), p);
  for (double v : {e.ell, e.delta, e.j_star, e.v_star, e.psi_star,
                   e.delta_n_star, e.ell_n_star,
                   static_cast<double>(e.iterations), e.wall_ms})
    *p++ = v;
  return EMPC_OK;
}

int empc_log_aborted(const empc_log *log) {
  return log && log->log.aborted ? 1 : 0;
}

const char *empc_log_abort_reason(const empc_log *log) {
  return log ? log->log.abort_reason.c_str() : "";
}

empc_status empc_log_write_csv(const empc_log *log, const char *path) {
  if (!log || !path)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    empc::write_closed_loop_csv(path, log->log, log->n, log->m);
  });
}

empc_status empc_log_quasi_steady(const empc_problem *p, const empc_log *log,
                                  double *eps_ell, double *eps_delta,
                                  int *stationary) {
  if (!p || !log)
    return fail(EMPC_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const empc::SteadyPair s = empc::optimal_steady_pair(
        p->problem.predictor, p->problem.objective, p->problem.bounds,
        p->cfg.steady);
    const empc::QuasiSteadyReport q =
        empc::quasi_steady(log->log, s, p->cfg.quasi);
    if (eps_ell)
      *eps_ell = q.eps_ell;
    if (eps_delta)
      *eps_delta = q.eps_delta;
    if (stationary)
      *stationary = q.stationary ? 1 : 0;
  });
}

void empc_log_free(empc_log *log) { delete log; }

} // extern "C"
