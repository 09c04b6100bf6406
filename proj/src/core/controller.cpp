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
#include "controller.hpp"

#include <chrono>
#include <cmath>

namespace empc {

void EMPCConfig::validate() const {
  if (horizon < 1)
    throw ConfigError("controller: horizon must be >= 1");
  if (!(alpha >= 0) || !(gamma >= 0))
    throw ConfigError("controller: alpha and gamma must be >= 0");
  if (!(tau_pred > 0) || !(tau_plant > 0))
    throw ConfigError("controller: periods must be positive");
  if (tau_plant > tau_pred) {
    const double ratio = tau_plant / tau_pred;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
      throw ConfigError("controller: tau_plant must not exceed tau_pred "
                        "unless it is an integer multiple of it");
  }
  if (steps < 1)
    throw ConfigError("controller: steps must be >= 1");
  if (x0.size() == 0 || !all_finite(x0))
    throw ConfigError("controller: x0 must be a finite, non-empty vector");
  solver.validate();
}

Controller::Controller(DiscreteDynamics predictor, EconomicObjective objective,
                       ControlBounds bounds, EMPCConfig config)
    : predictor_(std::move(predictor)),
      objective_(objective.with_weights(config.alpha, config.gamma)),
      config_(std::move(config)), bounds_(std::move(bounds)) {
  config_.validate();
  if (config_.x0.size() != predictor_.state_dim())
    throw ConfigError("controller: x0 dimension does not match the model");
  if (bounds_.dim() != predictor_.control_dim())
    throw ConfigError("controller: bounds dimension does not match the model");
  if (std::abs(predictor_.tau() - config_.tau_pred) > 1e-12)
    throw ConfigError("controller: predictor period differs from tau_pred");
  if (config_.cold_start.size() != 0 && !bounds_.contains(config_.cold_start))
    throw ConfigError("controller: cold start lies outside the control box");
}

ControlSequence Controller::cold_start() const {
  const Vector u = config_.cold_start.size() ? config_.cold_start
                                             : bounds_.midpoint();
  return ControlSequence::constant(config_.horizon, u, bounds_);
}

Controller::StepOutcome
Controller::mpc_step(const StateVector &x, const SolveResult *previous) const {
  if (x.size() != predictor_.state_dim() || !all_finite(x))
    throw ConfigError("mpc_step: state must be finite with the model dimension");
  ControlSequence warm =
      previous ? warm_start_shift(previous->useq) : cold_start();
  SolveResult result = solve(predictor_, objective_, x, warm, config_.solver);
  ControlVector u0 = result.useq[0];
  return {std::move(u0), std::move(warm), std::move(result)};
}

ClosedLoopLog simulate(const Controller &controller,
                       const DiscreteDynamics &plant) {
  const EMPCConfig &cfg = controller.config();
  if (plant.state_dim() != controller.predictor().state_dim() ||
      plant.control_dim() != controller.predictor().control_dim())
    throw ConfigError("simulate: plant and predictor dimensions differ");

  ClosedLoopLog log;
  log.entries.reserve(cfg.steps);
  StateVector x = cfg.x0;
  std::optional<SolveResult> previous;
  for (int k = 0; k < cfg.steps; ++k) {
    LogEntry e;
    e.step = k;
    e.time = k * plant.tau();
    e.x = x;
    StateVector next;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      auto outcome = controller.mpc_step(x, previous ? &*previous : nullptr);
      const auto t1 = std::chrono::steady_clock::now();
      e.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      e.u = outcome.u_applied;
      next = plant.step(x, e.u);
      e.ell = controller.objective().ell(x, e.u);
      e.delta = (next - x).norm() / plant.tau();
      const CostBreakdown &c = outcome.result.cost;
      e.j_star = c.total;
      e.v_star = c.running;
      e.psi_star = c.terminal;
      e.delta_n_star = c.terminal_delta;
      e.ell_n_star = c.terminal_ell;
      e.iterations = outcome.result.iterations;
      e.converged = outcome.result.converged;
      e.status = outcome.result.status;
      e.warm = std::move(outcome.warm);
      e.useq = outcome.result.useq;
      previous = std::move(outcome.result);
    } catch (const Error &err) {
      log.aborted = true;
      log.abort_reason = "step " + std::to_string(k) + " at state " +
                         format_vector(x) + ": " + err.what();
      break;
    }
    log.entries.push_back(std::move(e));
    x = std::move(next);
  }
  log.final_state = x;
  return log;
}

} // namespace empc
