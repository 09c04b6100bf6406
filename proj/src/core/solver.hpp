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
#ifndef EMPC_SOLVER_HPP
#define EMPC_SOLVER_HPP

#include "control_sequence.hpp"
#include "dynamics.hpp"
#include "objective.hpp"

#include <functional>
#include <string>

namespace empc {

enum class GradientMode { FiniteDifference, Adjoint };

GradientMode parse_gradient_mode(const std::string &name);
std::string to_string(GradientMode mode);

// Search direction used by solve().
//   Lbfgs:            projected limited-memory BFGS.
//   ProjectedNewton:  reduced Newton step on the free variables with a
//                     Hessian from forward differences of the gradient,
//                     eigenvalues clamped to stay positive definite.
enum class SolverMethod { Lbfgs, ProjectedNewton };

SolverMethod parse_solver_method(const std::string &name);
std::string to_string(SolverMethod method);

struct IterationRecord {
  int iteration;
  double cost;
  double projected_grad_norm;
  double step;
};

struct SolverSettings {
  int max_iters = 1000;
  double grad_tol = 1e-8;
  double step_tol = 1e-12;
  // Relative: h_i = fd_step * max(1, |u_i|).
  double fd_step = 1e-6;
  GradientMode gradient_mode = GradientMode::Adjoint;
  SolverMethod method = SolverMethod::Lbfgs;
  int memory = 10;
  // ProjectedNewton only: the finite-difference Hessian is rebuilt every
  // hessian_refresh iterations and BFGS-updated in between.
  int hessian_refresh = 1;
  double armijo = 1e-4;
  // Optional per-iteration diagnostics sink.
  std::function<void(const IterationRecord &)> on_iteration;

  void validate() const;
};

struct SolveResult {
  CostBreakdown cost;
  ControlSequence useq;
  int iterations = 0;
  bool converged = false;
  double projected_grad_norm = 0.0;
  int cost_evaluations = 0;
  std::string status;
};

/// Gradient of J with respect to the stacked sequence [u_0; ...; u_N].
Vector gradient(const DiscreteDynamics &dyn, const EconomicObjective &obj,
                const StateVector &x0, const ControlSequence &useq,
                GradientMode mode, double fd_step = 1e-6);

/// Cost and adjoint gradient from a single forward/backward sweep.
CostBreakdown cost_and_gradient(const DiscreteDynamics &dyn,
                                const EconomicObjective &obj,
                                const StateVector &x0,
                                const ControlSequence &useq, Vector &grad);

/// Norm of P(z - g) - z, zero exactly at first-order stationary points of
/// the box-constrained problem.
double projected_gradient_norm(const ControlSequence &useq, const Vector &grad);

/// Solves min_{u in U^{N+1}} J(u, x0) by single shooting, starting from
/// `warm`. Every iterate is projected onto the box and accepted only under
/// an Armijo decrease, so the returned cost never exceeds J(warm).
///
/// converged is set when the projected-gradient norm reaches grad_tol, or
/// when no step can be accepted and the full quasi-Newton/Newton step
/// predicts a decrease below the rounding level of J (status
/// "converged_precision").
SolveResult solve(const DiscreteDynamics &dyn, const EconomicObjective &obj,
                  const StateVector &x0, const ControlSequence &warm,
                  const SolverSettings &settings = {});

} // namespace empc

#endif // EMPC_SOLVER_HPP
