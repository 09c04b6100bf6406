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
#ifndef EMPC_OBJECTIVE_HPP
#define EMPC_OBJECTIVE_HPP

#include "control_sequence.hpp"
#include "dynamics.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace empc {

/// Economic stage cost l(x, u) with its gradient.
class StageCost {
public:
  virtual ~StageCost() = default;
  virtual double value(const Vector &x, const Vector &u) const = 0;
  virtual void gradient(const Vector &x, const Vector &u, Vector &gx,
                        Vector &gu) const = 0;
};

/// l(x, u) = qx.x + qu.u + c
class LinearStageCost final : public StageCost {
public:
  LinearStageCost(Vector qx, Vector qu, double c = 0.0);
  double value(const Vector &x, const Vector &u) const override;
  void gradient(const Vector &x, const Vector &u, Vector &gx,
                Vector &gu) const override;

private:
  Vector qx_, qu_;
  double c_;
};

/// l(x, u) = sum wx_i (x_i - xr_i)^2 + sum wu_j (u_j - ur_j)^2
class QuadraticStageCost final : public StageCost {
public:
  QuadraticStageCost(Vector wx, Vector x_ref, Vector wu, Vector u_ref);
  double value(const Vector &x, const Vector &u) const override;
  void gradient(const Vector &x, const Vector &u, Vector &gx,
                Vector &gu) const override;

private:
  Vector wx_, xr_, wu_, ur_;
};

using StageCostParams = std::map<std::string, std::vector<double>>;

/// Registry: "neg_x2" (-x_2, CSTR product), "linear", "quadratic", "zero".
std::shared_ptr<const StageCost>
make_stage_cost(const std::string &name, int state_dim, int control_dim,
                const StageCostParams &params = {});

/// Affine state constraints g(x) = A x - b <= 0, softened by the exact
/// penalty rho * sum_i max{0, g_i(x)}.
struct SoftConstraints {
  Matrix a;
  Vector b;
  double rho = 0.0;

  Vector g(const Vector &x) const { return a * x - b; }
  double penalty(const Vector &x) const;
};

/// Stage cost, soft-constraint penalty, increment weight alpha and terminal
/// weight gamma of the open-loop cost.
class EconomicObjective {
public:
  EconomicObjective(std::shared_ptr<const StageCost> stage_cost, double alpha,
                    double gamma,
                    std::optional<SoftConstraints> soft = std::nullopt,
                    double ell_shift = 0.0);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double ell_shift() const { return shift_; }
  const std::optional<SoftConstraints> &soft_constraints() const {
    return soft_;
  }

  EconomicObjective with_weights(double alpha, double gamma) const;
  EconomicObjective with_shift(double ell_shift) const;

  /// l(x, u) + rho * sum max{0, g(x)} + ell_shift
  double ell(const Vector &x, const Vector &u) const;
  /// Same without the reporting shift.
  double ell_unshifted(const Vector &x, const Vector &u) const;
  /// (Sub)gradient of ell; the penalty kink contributes zero at g_i = 0.
  void ell_gradient(const Vector &x, const Vector &u, Vector &gx,
                    Vector &gu) const;

private:
  std::shared_ptr<const StageCost> stage_;
  double alpha_;
  double gamma_;
  std::optional<SoftConstraints> soft_;
  double shift_;
};

struct StageValue {
  double ell;
  double delta;
};

StageValue stage(const EconomicObjective &obj, const DiscreteDynamics &dyn,
                 const StateVector &x, const ControlVector &u);

/// J = V + gamma * Psi_N with V the running sum over k < N and
/// Psi_N = l_N + alpha Delta_N the terminal stage at (x_N, u_N).
struct CostBreakdown {
  double total = 0.0;
  double running = 0.0;
  double terminal = 0.0;
  double weighted_terminal = 0.0;
  double terminal_ell = 0.0;
  double terminal_delta = 0.0;
};

/// Evaluates the open-loop cost. Delta_N needs f(x_N, u_N), so N+1 dynamics
/// steps are taken in total.
CostBreakdown total_cost(const EconomicObjective &obj,
                         const DiscreteDynamics &dyn, const StateVector &x0,
                         const ControlSequence &useq);

/// True iff shifting l by c moves J by exactly c (N + gamma), to 1e-9
/// relative.
bool shift_invariance_check(const EconomicObjective &obj,
                            const DiscreteDynamics &dyn, const StateVector &x0,
                            const ControlSequence &useq, double c);

} // namespace empc

#endif // EMPC_OBJECTIVE_HPP
