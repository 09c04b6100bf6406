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
#ifndef EMPC_STEADY_HPP
#define EMPC_STEADY_HPP

#include "dynamics.hpp"
#include "objective.hpp"

#include <string>
#include <vector>

namespace empc {

/// Optimal steady pair z_s = (x_s, u_s) over the equilibrium set.
struct SteadyPair {
  StateVector x_s;
  ControlVector u_s;
  double ell_s = 0.0;    // l at the pair, without the reporting shift
  double residual = 0.0; // ||f(x_s, u_s) - x_s||
  int skipped_points = 0;
  std::vector<std::string> warnings;
};

struct SteadyOptions {
  int grid_points = 401;
  double u_tol = 1e-10;
  // Newton start for models without a closed form; empty means zeros.
  Vector initial_guess;
  int max_newton_iters = 100;
  double newton_tol = 1e-12;
  // Coordinate sweeps of golden sections when m > 1.
  int coordinate_sweeps = 20;
};

/// Equilibrium state for a constant input. Uses the model's closed form when
/// it has one, otherwise damped Newton on F(x, u) = 0.
StateVector steady_state_for_input(const OdeModel &model,
                                   const ControlVector &u,
                                   const SteadyOptions &opts = {});

/// Same for a discrete map: damped Newton on f(x, u) - x = 0.
StateVector steady_state_for_input(const DiscreteDynamics &dyn,
                                   const ControlVector &u,
                                   const SteadyOptions &opts = {});

/// Grid scan of l(x(u), u) over the box followed by golden-section
/// refinement around the best grid point.
SteadyPair optimal_steady_pair(const DiscreteDynamics &dyn,
                               const EconomicObjective &obj,
                               const ControlBounds &bounds,
                               const SteadyOptions &opts = {});

/// Euclidean distance from (x, u) to the pair.
double distance_to_steady(const SteadyPair &pair, const StateVector &x,
                          const ControlVector &u);

} // namespace empc

#endif // EMPC_STEADY_HPP
