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
#include "steady.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace empc {

namespace {

template <typename Residual, typename Jacobian>
StateVector damped_newton(Residual residual, Jacobian jacobian, Vector x,
                          const SteadyOptions &opts) {
  std::vector<double> history;
  Vector r = residual(x);
  double norm = r.norm();
  history.push_back(norm);
  for (int it = 0; it < opts.max_newton_iters; ++it) {
    if (!std::isfinite(norm))
      break;
    if (norm <= opts.newton_tol)
      return x;
    const Matrix j = jacobian(x);
    const Vector dx = j.fullPivLu().solve(-r);
    if (!all_finite(dx))
      break;
    double t = 1.0;
    bool moved = false;
    while (t >= 1e-10) {
      const Vector trial = x + t * dx;
      const Vector rt = residual(trial);
      const double nt = rt.norm();
      if (std::isfinite(nt) && nt < (1.0 - 1e-4 * t) * norm) {
        x = trial;
        r = rt;
        norm = nt;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    history.push_back(norm);
    if (!moved)
      break;
  }
  if (norm <= opts.newton_tol)
    return x;
  throw SteadyStateError("steady state: Newton did not converge (residual " +
                             std::to_string(norm) + ")",
                         std::move(history));
}

Vector start_point(const SteadyOptions &opts, int n) {
  if (opts.initial_guess.size() == 0)
    return Vector::Zero(n);
  if (opts.initial_guess.size() != n)
    throw ConfigError("steady state: initial guess has wrong dimension");
  return opts.initial_guess;
}

struct Evaluated {
  double ell;
  StateVector x;
};

} // namespace

StateVector steady_state_for_input(const OdeModel &model,
                                   const ControlVector &u,
                                   const SteadyOptions &opts) {
  if (u.size() != model.control_dim())
    throw ConfigError("steady state: control has wrong dimension");
  if (auto x = model.analytic_steady_state(u))
    return *x;
  auto residual = [&](const Vector &x) { return model.rhs(x, u); };
  auto jacobian = [&](const Vector &x) {
    Matrix fx, fu;
    model.jacobians(x, u, fx, fu);
    return fx;
  };
  return damped_newton(residual, jacobian,
                       start_point(opts, model.state_dim()), opts);
}

StateVector steady_state_for_input(const DiscreteDynamics &dyn,
                                   const ControlVector &u,
                                   const SteadyOptions &opts) {
  if (dyn.ode())
    return steady_state_for_input(*dyn.ode(), u, opts);
  if (u.size() != dyn.control_dim())
    throw ConfigError("steady state: control has wrong dimension");
  auto residual = [&](const Vector &x) { return Vector(dyn.step(x, u) - x); };
  auto jacobian = [&](const Vector &x) {
    Matrix a, b;
    dyn.step(x, u, a, b);
    return Matrix(a - Matrix::Identity(x.size(), x.size()));
  };
  return damped_newton(residual, jacobian,
                       start_point(opts, dyn.state_dim()), opts);
}

SteadyPair optimal_steady_pair(const DiscreteDynamics &dyn,
                               const EconomicObjective &obj,
                               const ControlBounds &bounds,
                               const SteadyOptions &opts) {
  if (opts.grid_points < 3)
    throw ConfigError("steady pair: grid_points must be >= 3");
  if (!(opts.u_tol > 0))
    throw ConfigError("steady pair: u_tol must be positive");
  if (bounds.dim() != dyn.control_dim())
    throw ConfigError("steady pair: bounds have wrong dimension");

  SteadyPair pair;
  auto eval = [&](const ControlVector &u) -> std::optional<Evaluated> {
    try {
      StateVector x = steady_state_for_input(dyn, u, opts);
      const double l = obj.ell_unshifted(x, u);
      if (!std::isfinite(l) || !all_finite(x))
        return std::nullopt;
      return Evaluated{l, std::move(x)};
    } catch (const SteadyStateError &) {
      return std::nullopt;
    }
  };

  const int m = bounds.dim();
  const int g = opts.grid_points;
  const Vector lo = bounds.lower, hi = bounds.upper;
  auto grid_value = [&](int j, int i) {
    return lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) / (g - 1);
  };

  // Scan: the full grid for m = 1, per-coordinate lines through the
  // midpoint otherwise.
  ControlVector best_u = bounds.midpoint();
  double best = std::numeric_limits<double>::infinity();
  int attempted = 0;
  for (int j = 0; j < m; ++j) {
    ControlVector u = m == 1 ? ControlVector(lo) : ControlVector(best_u);
    for (int i = 0; i < g; ++i) {
      u[j] = grid_value(j, i);
      ++attempted;
      const auto e = eval(u);
      if (!e) {
        ++pair.skipped_points;
        pair.warnings.push_back("no equilibrium at u = " + format_vector(u));
        continue;
      }
      if (e->ell < best) {
        best = e->ell;
        best_u = u;
      }
    }
  }
  if (!std::isfinite(best))
    throw SteadyStateError("steady pair: no grid point has an equilibrium",
                           {});

  // Golden-section refinement within one grid cell either side.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto value_at = [&](ControlVector u) {
    const auto e = eval(u);
    return e ? e->ell : std::numeric_limits<double>::infinity();
  };
  const int sweeps = m == 1 ? 1 : opts.coordinate_sweeps;
  for (int s = 0; s < sweeps; ++s) {
    const ControlVector before = best_u;
    for (int j = 0; j < m; ++j) {
      const double cell = (hi[j] - lo[j]) / (g - 1);
      double a = std::max(lo[j], best_u[j] - cell);
      double b = std::min(hi[j], best_u[j] + cell);
      ControlVector u = best_u;
      double c = b - ratio * (b - a), d = a + ratio * (b - a);
      u[j] = c;
      double fc = value_at(u);
      u[j] = d;
      double fd = value_at(u);
      while (b - a > opts.u_tol) {
        if (fc <= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - ratio * (b - a);
          u[j] = c;
          fc = value_at(u);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + ratio * (b - a);
          u[j] = d;
          fd = value_at(u);
        }
      }
      u[j] = 0.5 * (a + b);
      const double fm = value_at(u);
      if (fm <= best) {
        best = fm;
        best_u = u;
      }
    }
    if ((best_u - before).norm() <= opts.u_tol)
      break;
  }

  const auto e = eval(best_u);
  pair.u_s = best_u;
  pair.x_s = e->x;
  pair.ell_s = e->ell;
  pair.residual = (dyn.step(pair.x_s, pair.u_s) - pair.x_s).norm();
  if (pair.skipped_points == attempted)
    throw SteadyStateError("steady pair: every grid point failed", {});
  return pair;
}

double distance_to_steady(const SteadyPair &pair, const StateVector &x,
                          const ControlVector &u) {
  const double dx = (x - pair.x_s).squaredNorm();
  const double du = (u - pair.u_s).squaredNorm();
  return std::sqrt(dx + du);
}

} // namespace empc
