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
#include "dynamics.hpp"

#include <cmath>

namespace empc {

namespace {

// Central-difference Jacobians of a vector function g(x, u).
template <class G>
void fd_jacobians(const G &g, const Vector &x, const Vector &u, Matrix &gx,
                  Matrix &gu) {
  const Vector g0 = g(x, u);
  gx.resize(g0.size(), x.size());
  gu.resize(g0.size(), u.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    gx.col(i) = (g(xp, u) - g(xm, u)) / (2 * h);
  }
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
    Vector up = u, um = u;
    up[j] += h;
    um[j] -= h;
    gu.col(j) = (g(x, up) - g(x, um)) / (2 * h);
  }
}

} // namespace

void OdeModel::jacobians(const Vector &x, const Vector &u, Matrix &fx,
                         Matrix &fu) const {
  fd_jacobians(
      [this](const Vector &xx, const Vector &uu) { return rhs(xx, uu); }, x, u,
      fx, fu);
}

int substeps_for(double tau, double max_substep) {
  if (!(tau > 0) || !(max_substep > 0))
    throw ConfigError("substeps_for: tau and max_substep must be positive");
  return std::max(1, static_cast<int>(std::ceil(tau / max_substep - 1e-9)));
}

DiscreteDynamics::DiscreteDynamics(std::shared_ptr<const OdeModel> ode,
                                   double tau, int substeps)
    : ode_(std::move(ode)), tau_(tau), substeps_(substeps) {
  if (!ode_)
    throw ConfigError("dynamics: null ODE model");
  if (!(tau > 0) || !std::isfinite(tau))
    throw ConfigError("dynamics: tau must be positive");
  if (substeps < 1)
    throw ConfigError("dynamics: substeps must be >= 1");
  n_ = ode_->state_dim();
  m_ = ode_->control_dim();
}

DiscreteDynamics::DiscreteDynamics(DiscreteMap map, double tau)
    : map_(std::make_shared<const DiscreteMap>(std::move(map))), tau_(tau) {
  if (!map_->map)
    throw ConfigError("dynamics: empty discrete map");
  if (!(tau > 0) || !std::isfinite(tau))
    throw ConfigError("dynamics: tau must be positive");
  n_ = map_->state_dim;
  m_ = map_->control_dim;
}

DiscreteDynamics DiscreteDynamics::with_period(double tau, int substeps) const {
  if (ode_)
    return DiscreteDynamics(ode_, tau, substeps);
  DiscreteDynamics d(*map_, tau);
  return d;
}

void DiscreteDynamics::check_dims(const Vector &x, const Vector &u) const {
  if (x.size() != n_ || u.size() != m_)
    throw ConfigError("dynamics: expected state dim " + std::to_string(n_) +
                      " and control dim " + std::to_string(m_) + ", got " +
                      std::to_string(x.size()) + " and " +
                      std::to_string(u.size()));
}

StateVector DiscreteDynamics::step(const StateVector &x,
                                   const ControlVector &u) const {
  check_dims(x, u);
  Vector out;
  if (map_) {
    out = map_->map(x, u);
  } else {
    const double h = tau_ / substeps_;
    out = x;
    Vector k1(n_), k2(n_), k3(n_), k4(n_), tmp(n_);
    for (int s = 0; s < substeps_; ++s) {
      ode_->rhs(out, u, k1);
      tmp = out + 0.5 * h * k1;
      ode_->rhs(tmp, u, k2);
      tmp = out + 0.5 * h * k2;
      ode_->rhs(tmp, u, k3);
      tmp = out + h * k3;
      ode_->rhs(tmp, u, k4);
      out += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!all_finite(out))
        throw IntegrationError("RK4 produced a non-finite state", x);
    }
  }
  if (!all_finite(out))
    throw IntegrationError("dynamics produced a non-finite state", x);
  return out;
}

StateVector DiscreteDynamics::step(const StateVector &x, const ControlVector &u,
                                   Matrix &a, Matrix &b) const {
  check_dims(x, u);
  if (map_) {
    if (map_->jacobians)
      map_->jacobians(x, u, a, b);
    else
      fd_jacobians(map_->map, x, u, a, b);
    Vector out = map_->map(x, u);
    if (!all_finite(out))
      throw IntegrationError("dynamics produced a non-finite state", x);
    return out;
  }

  // Forward sensitivities S = [dx/dx0, dx/du] carried through every RK4 stage.
  // The state update uses the same expressions as the plain step so both
  // overloads return bitwise-identical states.
  const double h = tau_ / substeps_;
  Vector xs = x;
  a.setIdentity(n_, n_);
  b.setZero(n_, m_);
  Vector k1(n_), k2(n_), k3(n_), k4(n_), tmp(n_);
  Matrix fx(n_, n_), fu(n_, m_);
  Matrix k1x(n_, n_), k2x(n_, n_), k3x(n_, n_), k4x(n_, n_), sx(n_, n_);
  Matrix k1u(n_, m_), k2u(n_, m_), k3u(n_, m_), k4u(n_, m_), su(n_, m_);
  for (int s = 0; s < substeps_; ++s) {
    ode_->rhs_and_jacobians(xs, u, k1, fx, fu);
    k1x.noalias() = fx.lazyProduct(a);
    k1u.noalias() = fx.lazyProduct(b);
    k1u += fu;

    tmp = xs + 0.5 * h * k1;
    ode_->rhs_and_jacobians(tmp, u, k2, fx, fu);
    sx = a + 0.5 * h * k1x;
    su = b + 0.5 * h * k1u;
    k2x.noalias() = fx.lazyProduct(sx);
    k2u.noalias() = fx.lazyProduct(su);
    k2u += fu;

    tmp = xs + 0.5 * h * k2;
    ode_->rhs_and_jacobians(tmp, u, k3, fx, fu);
    sx = a + 0.5 * h * k2x;
    su = b + 0.5 * h * k2u;
    k3x.noalias() = fx.lazyProduct(sx);
    k3u.noalias() = fx.lazyProduct(su);
    k3u += fu;

    tmp = xs + h * k3;
    ode_->rhs_and_jacobians(tmp, u, k4, fx, fu);
    sx = a + h * k3x;
    su = b + h * k3u;
    k4x.noalias() = fx.lazyProduct(sx);
    k4u.noalias() = fx.lazyProduct(su);
    k4u += fu;

    xs += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    b += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    if (!all_finite(xs))
      throw IntegrationError("RK4 produced a non-finite state", x);
  }
  return xs;
}

double DiscreteDynamics::delta(const StateVector &x,
                               const ControlVector &u) const {
  return (step(x, u) - x).norm() / tau_;
}

Trajectory DiscreteDynamics::rollout(const StateVector &x0,
                                     const ControlSequence &useq) const {
  if (x0.size() != n_ || useq.control_dim() != m_)
    throw ConfigError("rollout: dimension mismatch");
  Trajectory traj;
  traj.reserve(useq.size());
  traj.push_back(x0);
  for (int k = 0; k < useq.horizon(); ++k) {
    try {
      traj.push_back(step(traj.back(), useq[k]));
    } catch (const IntegrationError &e) {
      throw IntegrationError("rollout failed at step " + std::to_string(k),
                             e.state(), k);
    }
  }
  return traj;
}

} // namespace empc
