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
#include "solver.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace empc {

GradientMode parse_gradient_mode(const std::string &name) {
  if (name == "adjoint")
    return GradientMode::Adjoint;
  if (name == "finite-difference" || name == "fd")
    return GradientMode::FiniteDifference;
  throw ConfigError("unknown gradient mode '" + name + "'");
}

std::string to_string(GradientMode mode) {
  return mode == GradientMode::Adjoint ? "adjoint" : "finite-difference";
}

void SolverSettings::validate() const {
  if (max_iters < 1)
    throw ConfigError("solver: max_iters must be positive");
  if (!(grad_tol > 0) || !(step_tol > 0) || !(fd_step > 0))
    throw ConfigError("solver: tolerances must be positive");
  if (memory < 1)
    throw ConfigError("solver: memory must be positive");
  if (hessian_refresh < 1)
    throw ConfigError("solver: hessian_refresh must be positive");
  if (!(armijo > 0 && armijo < 1))
    throw ConfigError("solver: armijo constant must lie in (0, 1)");
}

CostBreakdown cost_and_gradient(const DiscreteDynamics &dyn,
                                const EconomicObjective &obj,
                                const StateVector &x0,
                                const ControlSequence &useq, Vector &grad) {
  const int horizon = useq.horizon();
  const int n = dyn.state_dim();
  const int m = dyn.control_dim();
  const double tau = dyn.tau();
  const double alpha = obj.alpha();

  std::vector<Vector> xs(horizon + 2);
  std::vector<Matrix> as(horizon + 1), bs(horizon + 1);
  xs[0] = x0;
  for (int k = 0; k <= horizon; ++k) {
    try {
      xs[k + 1] = dyn.step(xs[k], useq[k], as[k], bs[k]);
    } catch (const IntegrationError &e) {
      throw IntegrationError("cost evaluation failed at step " +
                                 std::to_string(k),
                             e.state(), k);
    }
  }

  CostBreakdown out;
  // e_k = d Delta_k / d x_{k+1}; zero subgradient where the increment vanishes.
  std::vector<Vector> unit(horizon + 1);
  for (int k = 0; k <= horizon; ++k) {
    const Vector d = xs[k + 1] - xs[k];
    const double nd = d.norm();
    const double ell = obj.ell(xs[k], useq[k]);
    const double delta = nd / tau;
    unit[k] = nd > 0 ? Vector(d / (nd * tau)) : Vector::Zero(n);
    if (k < horizon) {
      out.running += ell + alpha * delta;
    } else {
      out.terminal_ell = ell;
      out.terminal_delta = delta;
      out.terminal = ell + alpha * delta;
    }
  }
  out.weighted_terminal = obj.gamma() * out.terminal;
  out.total = out.running + out.weighted_terminal;

  auto weight = [&](int k) { return k < horizon ? 1.0 : obj.gamma(); };
  grad.resize(static_cast<Eigen::Index>(m) * (horizon + 1));
  Vector mu = weight(horizon) * alpha * unit[horizon];
  Vector gx, gu;
  for (int k = horizon; k >= 0; --k) {
    const double w = weight(k);
    obj.ell_gradient(xs[k], useq[k], gx, gu);
    grad.segment(static_cast<Eigen::Index>(k) * m, m) =
        w * gu + bs[k].transpose() * mu;
    Vector next_mu = w * (gx - alpha * unit[k]) + as[k].transpose() * mu;
    if (k >= 1)
      next_mu += weight(k - 1) * alpha * unit[k - 1];
    mu = std::move(next_mu);
  }
  return out;
}

Vector gradient(const DiscreteDynamics &dyn, const EconomicObjective &obj,
                const StateVector &x0, const ControlSequence &useq,
                GradientMode mode, double fd_step) {
  if (mode == GradientMode::Adjoint) {
    Vector g;
    cost_and_gradient(dyn, obj, x0, useq, g);
    return g;
  }
  // Central differences on the raw (unprojected) stacked vector.
  const Vector z = useq.stacked();
  const int m = useq.control_dim();
  Vector g(z.size());
  Matrix values = useq.values();
  // Bounds are widened so the probes may step outside the box.
  const ControlBounds wide(useq.bounds().lower.array() - 1e300,
                           useq.bounds().upper.array() + 1e300);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = fd_step * std::max(1.0, std::abs(z[i]));
    const auto r = static_cast<int>(i % m);
    const auto c = static_cast<int>(i / m);
    auto eval = [&](double v) {
      Matrix vals = values;
      vals(r, c) = v;
      return total_cost(obj, dyn, x0, ControlSequence(vals, wide)).total;
    };
    g[i] = (eval(z[i] + h) - eval(z[i] - h)) / (2 * h);
  }
  return g;
}

double projected_gradient_norm(const ControlSequence &useq,
                               const Vector &grad) {
  const Vector z = useq.stacked();
  const ControlSequence projected = useq.with_stacked(z - grad);
  return (projected.stacked() - z).norm();
}

namespace {

struct Pair {
  Vector s;
  Vector y;
};

// Stacked lower/upper bounds matching the stacked sequence layout.
std::pair<Vector, Vector> stacked_bounds(const ControlSequence &useq) {
  const int m = useq.control_dim();
  const int len = m * useq.size();
  Vector lo(len), hi(len);
  for (int k = 0; k < useq.size(); ++k) {
    lo.segment(k * m, m) = useq.bounds().lower;
    hi.segment(k * m, m) = useq.bounds().upper;
  }
  return {lo, hi};
}

// Two-loop recursion restricted to the free variables (mask == 1).
Vector lbfgs_direction(const std::deque<Pair> &pairs, const Vector &g,
                       const Vector &mask) {
  Vector q = g.cwiseProduct(mask);
  std::vector<double> alphas(pairs.size(), 0.0);
  std::vector<double> rhos(pairs.size(), 0.0);
  std::vector<bool> use(pairs.size(), false);
  double scale = 0.0;
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    const Vector s = pairs[i].s.cwiseProduct(mask);
    const Vector y = pairs[i].y.cwiseProduct(mask);
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm()))
      continue;
    use[i] = true;
    rhos[i] = 1.0 / sy;
    alphas[i] = rhos[i] * s.dot(q);
    q -= alphas[i] * y;
    if (scale == 0.0)
      scale = sy / y.squaredNorm();
  }
  if (scale == 0.0)
    return Vector();
  Vector r = scale * q;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!use[i])
      continue;
    const Vector s = pairs[i].s.cwiseProduct(mask);
    const Vector y = pairs[i].y.cwiseProduct(mask);
    const double beta = rhos[i] * y.dot(r);
    r += (alphas[i] - beta) * s;
  }
  return -r;
}

// Newton step on the free block of a symmetrised Hessian. Eigenvalues are
// reflected and floored so the step is a descent direction.
Vector newton_direction(const Matrix &hessian, const Vector &g,
                        const Vector &mask) {
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    if (mask[i] != 0.0)
      free.push_back(i);
  Vector d = Vector::Zero(g.size());
  if (free.empty())
    return d;
  const auto nf = static_cast<Eigen::Index>(free.size());
  Matrix hf(nf, nf);
  Vector gf(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    gf[i] = g[free[i]];
    for (Eigen::Index j = 0; j < nf; ++j)
      hf(i, j) = hessian(free[i], free[j]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hf);
  if (es.info() != Eigen::Success)
    return Vector();
  Vector lam = es.eigenvalues().cwiseAbs();
  const double floor = std::max(1e-10 * lam.maxCoeff(), 1e-14);
  lam = lam.cwiseMax(floor);
  const Vector df = -es.eigenvectors() *
                    (es.eigenvectors().transpose() * gf).cwiseQuotient(lam);
  for (Eigen::Index i = 0; i < nf; ++i)
    d[free[i]] = df[i];
  return d;
}

// A full quasi-Newton step that would lower J by less than the rounding
// level of J cannot be resolved by any cost-based line search.
bool at_precision_limit(double predicted_decrease, double cost) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return predicted_decrease >= 0 &&
         predicted_decrease <= 64 * eps * std::max(1.0, std::abs(cost));
}

} // namespace

SolverMethod parse_solver_method(const std::string &name) {
  if (name == "lbfgs")
    return SolverMethod::Lbfgs;
  if (name == "projected-newton" || name == "newton")
    return SolverMethod::ProjectedNewton;
  throw ConfigError("unknown solver method '" + name + "'");
}

std::string to_string(SolverMethod method) {
  return method == SolverMethod::Lbfgs ? "lbfgs" : "projected-newton";
}

SolveResult solve(const DiscreteDynamics &dyn, const EconomicObjective &obj,
                  const StateVector &x0, const ControlSequence &warm,
                  const SolverSettings &settings) {
  settings.validate();
  if (x0.size() != dyn.state_dim() || warm.control_dim() != dyn.control_dim())
    throw ConfigError("solve: dimension mismatch");
  if (!all_finite(x0))
    throw ConfigError("solve: initial state is not finite");

  int evals = 0;
  auto grad_at = [&](const ControlSequence &u) {
    ++evals;
    return gradient(dyn, obj, x0, u, settings.gradient_mode, settings.fd_step);
  };
  auto evaluate = [&](const ControlSequence &u, Vector &g) {
    ++evals;
    if (settings.gradient_mode == GradientMode::Adjoint)
      return cost_and_gradient(dyn, obj, x0, u, g);
    CostBreakdown c = total_cost(obj, dyn, x0, u);
    g = gradient(dyn, obj, x0, u, GradientMode::FiniteDifference,
                 settings.fd_step);
    return c;
  };
  auto cost_only = [&](const ControlSequence &u) {
    ++evals;
    try {
      return total_cost(obj, dyn, x0, u).total;
    } catch (const IntegrationError &) {
      return std::numeric_limits<double>::infinity();
    }
  };

  ControlSequence current = warm;
  Vector g;
  CostBreakdown cost;
  try {
    cost = evaluate(current, g);
  } catch (const IntegrationError &e) {
    throw SolverStartError(std::string("no finite cost at warm start: ") +
                           e.what());
  }
  if (!std::isfinite(cost.total) || !all_finite(g))
    throw SolverStartError("no finite cost at warm start");

  const auto [lo, hi] = stacked_bounds(current);
  const double width = (hi - lo).minCoeff();
  const double sd_scale = width > 0 ? 0.1 * width : 1.0;
  ControlBounds wide(current.bounds().lower.array() - 1e300,
                     current.bounds().upper.array() + 1e300);

  // Forward differences of the gradient; probes may leave the box.
  auto hessian_at = [&](const ControlSequence &u, const Vector &g0) {
    const Vector z = u.stacked();
    const auto len = z.size();
    const Matrix shape = u.values();
    Matrix h(len, len);
    Vector zp = z;
    for (Eigen::Index i = 0; i < len; ++i) {
      const double step = 1e-6 * std::max(1.0, std::abs(z[i]));
      zp[i] = z[i] + step;
      const ControlSequence probe(
          Eigen::Map<const Matrix>(zp.data(), shape.rows(), shape.cols()),
          wide);
      h.col(i) = (grad_at(probe) - g0) / step;
      zp[i] = z[i];
    }
    return Matrix(0.5 * (h + h.transpose()));
  };

  std::deque<Pair> pairs;
  Matrix hessian;
  int hessian_age = 0;
  double pg = projected_gradient_norm(current, g);
  int iter = 0;
  std::string status = "max_iters";
  bool converged = pg <= settings.grad_tol;
  if (converged)
    status = "converged";

  while (!converged && iter < settings.max_iters) {
    ++iter;
    const Vector z = current.stacked();
    // Variables held at a bound by the gradient sign are frozen this iteration.
    Vector mask = Vector::Ones(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if ((z[i] <= lo[i] && g[i] > 0) || (z[i] >= hi[i] && g[i] < 0))
        mask[i] = 0.0;

    auto steepest = [&]() -> Vector {
      const Vector gm = g.cwiseProduct(mask);
      const double gmax = gm.lpNorm<Eigen::Infinity>();
      return gmax > 0 ? Vector(-gm * (sd_scale / gmax)) : Vector(-gm);
    };

    bool accepted = false;
    double step = 0.0;
    double predicted = -1.0;
    ControlSequence trial;
    double trial_cost = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector d;
      if (attempt == 0) {
        if (settings.method == SolverMethod::Lbfgs) {
          d = lbfgs_direction(pairs, g, mask);
        } else {
          if (hessian.size() == 0 || hessian_age >= settings.hessian_refresh) {
            hessian = hessian_at(current, g);
            hessian_age = 0;
          }
          d = newton_direction(hessian, g, mask);
        }
        if (d.size() != 0 && all_finite(d))
          predicted = -g.dot(current.with_stacked(z + d).stacked() - z);
      }
      if (d.size() == 0 || !all_finite(d) || !(g.dot(d) < 0)) {
        attempt = 1;
        d = steepest();
      }
      if (!(g.dot(d) < 0))
        break;
      for (double t = 1.0; t >= settings.step_tol; t *= 0.5) {
        trial = current.with_stacked(z + t * d);
        trial_cost = cost_only(trial);
        const double decrease = g.dot(trial.stacked() - z);
        if (std::isfinite(trial_cost) &&
            trial_cost <= cost.total + settings.armijo * decrease &&
            trial_cost <= cost.total) {
          accepted = true;
          step = t;
          break;
        }
      }
      if (!accepted) {
        pairs.clear();
        hessian.resize(0, 0);
      }
    }
    if (!accepted) {
      status = "line_search_failed";
      if (at_precision_limit(predicted, cost.total)) {
        converged = true;
        status = "converged_precision";
      }
      break;
    }

    Vector g_new;
    CostBreakdown cost_new = evaluate(trial, g_new);
    Pair p{trial.stacked() - z, g_new - g};
    const double sy = p.s.dot(p.y);
    if (hessian.size() != 0) {
      ++hessian_age;
      // Dense BFGS update between finite-difference rebuilds.
      if (sy > 1e-12 * p.s.norm() * p.y.norm()) {
        const Vector hs = hessian * p.s;
        const double shs = p.s.dot(hs);
        if (shs > 0)
          hessian += p.y * p.y.transpose() / sy - hs * hs.transpose() / shs;
      }
    }
    if (sy > 1e-12 * p.s.norm() * p.y.norm()) {
      pairs.push_back(std::move(p));
      if (static_cast<int>(pairs.size()) > settings.memory)
        pairs.pop_front();
    }
    const bool stalled = (trial.stacked() - z).norm() == 0.0;
    current = std::move(trial);
    cost = cost_new;
    g = std::move(g_new);
    pg = projected_gradient_norm(current, g);
    if (settings.on_iteration)
      settings.on_iteration({iter, cost.total, pg, step});
    if (pg <= settings.grad_tol) {
      converged = true;
      status = "converged";
    } else if (stalled) {
      status = "stalled";
      if (at_precision_limit(predicted, cost.total)) {
        converged = true;
        status = "converged_precision";
      }
      break;
    }
  }

  SolveResult res;
  res.cost = cost;
  res.useq = std::move(current);
  res.iterations = iter;
  res.converged = converged;
  res.projected_grad_norm = pg;
  res.cost_evaluations = evals;
  res.status = status;
  return res;
}

} // namespace empc
