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
#ifndef EMPC_DYNAMICS_HPP
#define EMPC_DYNAMICS_HPP

#include "control_sequence.hpp"
#include "types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace empc {

/// Continuous-time right-hand side xdot = F(x, u).
class OdeModel {
public:
  virtual ~OdeModel() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  /// Writes F(x, u) into dx, which is already sized to state_dim().
  virtual void rhs(const Vector &x, const Vector &u, Vector &dx) const = 0;

  Vector rhs(const Vector &x, const Vector &u) const {
    Vector dx(state_dim());
    rhs(x, u, dx);
    return dx;
  }

  // Jacobians dF/dx (n x n) and dF/du (n x m). The default uses central
  // differences; models with closed forms override it.
  virtual void jacobians(const Vector &x, const Vector &u, Matrix &fx,
                         Matrix &fu) const;

  // F and both Jacobians at once; models override it to share work.
  virtual void rhs_and_jacobians(const Vector &x, const Vector &u, Vector &dx,
                                 Matrix &fx, Matrix &fu) const {
    rhs(x, u, dx);
    jacobians(x, u, fx, fu);
  }

  // Closed-form equilibrium state for a constant input, if the model has one.
  virtual std::optional<Vector> analytic_steady_state(const Vector &u) const {
    (void)u;
    return std::nullopt;
  }
};

/// Native discrete map x+ = f(x, u) with optional Jacobians.
struct DiscreteMap {
  int state_dim = 0;
  int control_dim = 0;
  std::function<Vector(const Vector &, const Vector &)> map;
  // Fills A = df/dx and B = df/du. Left empty -> central differences.
  std::function<void(const Vector &, const Vector &, Matrix &, Matrix &)>
      jacobians;
};

/// States x_0 ... x_N produced by a rollout.
using Trajectory = std::vector<StateVector>;

/// Discrete-time dynamics f(x, u).
///
/// ODE-backed instances apply `substeps` classical RK4 steps of size
/// tau / substeps with the input held constant over the period. Native maps
/// use tau only as the normaliser of the increment measure.
class DiscreteDynamics {
public:
  DiscreteDynamics(std::shared_ptr<const OdeModel> ode, double tau,
                   int substeps);
  DiscreteDynamics(DiscreteMap map, double tau);

  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  double tau() const { return tau_; }
  int substeps() const { return substeps_; }
  const OdeModel *ode() const { return ode_.get(); }

  /// Same model, different period and sub-step count.
  DiscreteDynamics with_period(double tau, int substeps) const;

  StateVector step(const StateVector &x, const ControlVector &u) const;

  /// f(x, u) together with A = df/dx and B = df/du. For ODE models the
  /// Jacobians are the exact derivatives of the RK4 map.
  StateVector step(const StateVector &x, const ControlVector &u, Matrix &a,
                   Matrix &b) const;

  /// ||f(x, u) - x||_2 / tau.
  double delta(const StateVector &x, const ControlVector &u) const;

  Trajectory rollout(const StateVector &x0, const ControlSequence &useq) const;

private:
  void check_dims(const Vector &x, const Vector &u) const;

  std::shared_ptr<const OdeModel> ode_;
  std::shared_ptr<const DiscreteMap> map_;
  int n_ = 0;
  int m_ = 0;
  double tau_ = 1.0;
  int substeps_ = 1;
};

/// Smallest sub-step count whose step size does not exceed max_substep.
int substeps_for(double tau, double max_substep);

} // namespace empc

#endif // EMPC_DYNAMICS_HPP
