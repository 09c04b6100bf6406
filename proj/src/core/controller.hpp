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
#ifndef EMPC_CONTROLLER_HPP
#define EMPC_CONTROLLER_HPP

#include "control_sequence.hpp"
#include "dynamics.hpp"
#include "objective.hpp"
#include "solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace empc {

struct EMPCConfig {
  int horizon = 20;
  double alpha = 0.0;
  double gamma = 0.0;
  double tau_pred = 0.1;
  double tau_plant = 0.1;
  int steps = 1;
  StateVector x0;
  // Constant first warm start; empty means the box midpoint.
  ControlVector cold_start;
  SolverSettings solver;

  void validate() const;
};

/// One closed-loop step. The starred quantities belong to the open-loop
/// optimum solved at x.
struct LogEntry {
  int step = 0;
  double time = 0.0;
  StateVector x;
  ControlVector u;
  double ell = 0.0;
  double delta = 0.0;
  double j_star = 0.0;
  double v_star = 0.0;
  double psi_star = 0.0;
  double delta_n_star = 0.0;
  double ell_n_star = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
  double wall_ms = 0.0;
  // Warm start handed to the solver and the optimiser it returned.
  ControlSequence warm;
  ControlSequence useq;
};

struct ClosedLoopLog {
  std::vector<LogEntry> entries;
  // Set when the run stopped early; the entries logged so far are kept.
  bool aborted = false;
  std::string abort_reason;
  StateVector final_state;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Receding-horizon feedback u = u*_0(x) over the predictor dynamics.
class Controller {
public:
  Controller(DiscreteDynamics predictor, EconomicObjective objective,
             ControlBounds bounds, EMPCConfig config);

  struct StepOutcome {
    ControlVector u_applied;
    ControlSequence warm;
    SolveResult result;
  };

  /// Solves P(x) from the shifted previous optimiser, or from the cold start
  /// when there is none.
  StepOutcome mpc_step(const StateVector &x,
                       const SolveResult *previous = nullptr) const;

  ControlSequence cold_start() const;

  const DiscreteDynamics &predictor() const { return predictor_; }
  const EconomicObjective &objective() const { return objective_; }
  const EMPCConfig &config() const { return config_; }
  const ControlBounds &bounds() const { return bounds_; }

private:
  DiscreteDynamics predictor_;
  EconomicObjective objective_;
  EMPCConfig config_;
  ControlBounds bounds_;
};

/// Runs `config.steps` closed-loop iterations; each applies u*_0 for one
/// plant period. The plant dynamics also normalise the logged Delta.
ClosedLoopLog simulate(const Controller &controller,
                       const DiscreteDynamics &plant);

} // namespace empc

#endif // EMPC_CONTROLLER_HPP
