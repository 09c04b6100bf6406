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
#include "objective.hpp"

#include <cmath>

namespace empc {

LinearStageCost::LinearStageCost(Vector qx, Vector qu, double c)
    : qx_(std::move(qx)), qu_(std::move(qu)), c_(c) {}

double LinearStageCost::value(const Vector &x, const Vector &u) const {
  return qx_.dot(x) + qu_.dot(u) + c_;
}

void LinearStageCost::gradient(const Vector &, const Vector &, Vector &gx,
                               Vector &gu) const {
  gx = qx_;
  gu = qu_;
}

QuadraticStageCost::QuadraticStageCost(Vector wx, Vector x_ref, Vector wu,
                                       Vector u_ref)
    : wx_(std::move(wx)), xr_(std::move(x_ref)), wu_(std::move(wu)),
      ur_(std::move(u_ref)) {
  if (wx_.size() != xr_.size() || wu_.size() != ur_.size())
    throw ConfigError("quadratic stage cost: weight/reference size mismatch");
}

double QuadraticStageCost::value(const Vector &x, const Vector &u) const {
  return (wx_.array() * (x - xr_).array().square()).sum() +
         (wu_.array() * (u - ur_).array().square()).sum();
}

void QuadraticStageCost::gradient(const Vector &x, const Vector &u, Vector &gx,
                                  Vector &gu) const {
  gx = 2.0 * wx_.cwiseProduct(x - xr_);
  gu = 2.0 * wu_.cwiseProduct(u - ur_);
}

namespace {

Vector param_or(const StageCostParams &p, const std::string &key, int dim,
                double fill) {
  auto it = p.find(key);
  if (it == p.end())
    return Vector::Constant(dim, fill);
  if (static_cast<int>(it->second.size()) != dim)
    throw ConfigError("stage cost parameter '" + key + "' must have " +
                      std::to_string(dim) + " entries");
  return Eigen::Map<const Vector>(it->second.data(), dim);
}

} // namespace

std::shared_ptr<const StageCost>
make_stage_cost(const std::string &name, int n, int m,
                const StageCostParams &params) {
  for (const auto &[key, _] : params) {
    const bool known = (name == "linear" && (key == "qx" || key == "qu" || key == "c")) ||
                       (name == "quadratic" && (key == "wx" || key == "x_ref" ||
                                                key == "wu" || key == "u_ref"));
    if (!known)
      throw ConfigError("stage cost '" + name + "': unknown parameter '" + key + "'");
  }
  if (name == "neg_x2") {
    if (n < 2)
      throw ConfigError("stage cost neg_x2 needs at least two states");
    Vector qx = Vector::Zero(n);
    qx[1] = -1.0;
    return std::make_shared<LinearStageCost>(qx, Vector::Zero(m));
  }
  if (name == "zero")
    return std::make_shared<LinearStageCost>(Vector::Zero(n), Vector::Zero(m));
  if (name == "linear") {
    const double c = params.count("c") ? param_or(params, "c", 1, 0.0)[0] : 0.0;
    return std::make_shared<LinearStageCost>(param_or(params, "qx", n, 0.0),
                                             param_or(params, "qu", m, 0.0), c);
  }
  if (name == "quadratic")
    return std::make_shared<QuadraticStageCost>(
        param_or(params, "wx", n, 0.0), param_or(params, "x_ref", n, 0.0),
        param_or(params, "wu", m, 0.0), param_or(params, "u_ref", m, 0.0));
  throw ConfigError("unknown stage cost '" + name + "'");
}

double SoftConstraints::penalty(const Vector &x) const {
  return rho * g(x).cwiseMax(0.0).sum();
}

EconomicObjective::EconomicObjective(std::shared_ptr<const StageCost> stage_cost,
                                     double alpha, double gamma,
                                     std::optional<SoftConstraints> soft,
                                     double ell_shift)
    : stage_(std::move(stage_cost)), alpha_(alpha), gamma_(gamma),
      soft_(std::move(soft)), shift_(ell_shift) {
  if (!stage_)
    throw ConfigError("objective: null stage cost");
  if (!(alpha >= 0) || !(gamma >= 0))
    throw ConfigError("objective: alpha and gamma must be >= 0");
  if (soft_) {
    if (!(soft_->rho >= 0))
      throw ConfigError("objective: penalty weight rho must be >= 0");
    if (soft_->a.rows() != soft_->b.size())
      throw ConfigError("objective: soft constraint rows mismatch");
  }
}

EconomicObjective EconomicObjective::with_weights(double alpha,
                                                  double gamma) const {
  return EconomicObjective(stage_, alpha, gamma, soft_, shift_);
}

EconomicObjective EconomicObjective::with_shift(double ell_shift) const {
  return EconomicObjective(stage_, alpha_, gamma_, soft_, ell_shift);
}

double EconomicObjective::ell_unshifted(const Vector &x, const Vector &u) const {
  double v = stage_->value(x, u);
  if (soft_)
    v += soft_->penalty(x);
  return v;
}

double EconomicObjective::ell(const Vector &x, const Vector &u) const {
  return ell_unshifted(x, u) + shift_;
}

void EconomicObjective::ell_gradient(const Vector &x, const Vector &u,
                                     Vector &gx, Vector &gu) const {
  stage_->gradient(x, u, gx, gu);
  if (soft_) {
    const Vector g = soft_->g(x);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (g[i] > 0)
        gx += soft_->rho * soft_->a.row(i).transpose();
  }
}

StageValue stage(const EconomicObjective &obj, const DiscreteDynamics &dyn,
                 const StateVector &x, const ControlVector &u) {
  return {obj.ell(x, u), dyn.delta(x, u)};
}

CostBreakdown total_cost(const EconomicObjective &obj,
                         const DiscreteDynamics &dyn, const StateVector &x0,
                         const ControlSequence &useq) {
  if (x0.size() != dyn.state_dim() || useq.control_dim() != dyn.control_dim())
    throw ConfigError("total_cost: dimension mismatch");
  const int horizon = useq.horizon();
  CostBreakdown out;
  Vector x = x0;
  for (int k = 0; k <= horizon; ++k) {
    const Vector u = useq[k];
    Vector next;
    try {
      next = dyn.step(x, u);
    } catch (const IntegrationError &e) {
      throw IntegrationError("cost evaluation failed at step " +
                                 std::to_string(k),
                             e.state(), k);
    }
    const double ell = obj.ell(x, u);
    const double delta = (next - x).norm() / dyn.tau();
    if (k < horizon) {
      out.running += ell + obj.alpha() * delta;
    } else {
      out.terminal_ell = ell;
      out.terminal_delta = delta;
      out.terminal = ell + obj.alpha() * delta;
    }
    x = std::move(next);
  }
  out.weighted_terminal = obj.gamma() * out.terminal;
  out.total = out.running + out.weighted_terminal;
  return out;
}

bool shift_invariance_check(const EconomicObjective &obj,
                            const DiscreteDynamics &dyn, const StateVector &x0,
                            const ControlSequence &useq, double c) {
  const double base = total_cost(obj.with_shift(0.0), dyn, x0, useq).total;
  const double shifted = total_cost(obj.with_shift(c), dyn, x0, useq).total;
  const double expected = base + c * (useq.horizon() + obj.gamma());
  const double scale = std::max({1.0, std::abs(expected), std::abs(shifted)});
  return std::abs(shifted - expected) <= 1e-9 * scale;
}

} // namespace empc
