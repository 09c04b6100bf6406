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
#include "models.hpp"
#include "solver.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace empc;

namespace {

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector v1(double a) { return Vector::Constant(1, a); }

DiscreteDynamics identity(int n) {
  DiscreteMap map;
  map.state_dim = n;
  map.control_dim = n;
  map.map = [](const Vector &x, const Vector &) { return x; };
  map.jacobians = [n](const Vector &, const Vector &, Matrix &a, Matrix &b) {
    a = Matrix::Identity(n, n);
    b = Matrix::Zero(n, n);
  };
  return DiscreteDynamics(map, 0.1);
}

const ControlBounds kCstrBox(v1(0.049), v1(0.449));

SolverSettings newton() {
  SolverSettings s;
  s.method = SolverMethod::ProjectedNewton;
  s.hessian_refresh = 10;
  return s;
}

// Exhaustive search for m = 1: uniform lattice, then repeated local
// refinement around the incumbent. Each round halves the window for a
// five-point lattice.
double grid_best(const DiscreteDynamics &dyn, const EconomicObjective &obj,
                 const Vector &x0, int horizon, const ControlBounds &box,
                 int points, int refinements) {
  const int dims = horizon + 1;
  Vector lo = Vector::Constant(dims, box.lower[0]);
  Vector hi = Vector::Constant(dims, box.upper[0]);
  Vector best_z = 0.5 * (lo + hi);
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r <= refinements; ++r) {
    std::vector<int> idx(dims, 0);
    while (true) {
      Vector z(dims);
      for (int i = 0; i < dims; ++i)
        z[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (points - 1);
      const Matrix values = z.transpose();
      const double j =
          total_cost(obj, dyn, x0, ControlSequence(values, box)).total;
      if (j < best) {
        best = j;
        best_z = z;
      }
      int i = 0;
      while (i < dims && ++idx[i] == points)
        idx[i++] = 0;
      if (i == dims)
        break;
    }
    for (int i = 0; i < dims; ++i) {
      const double h = (hi[i] - lo[i]) / (points - 1);
      lo[i] = std::max(box.lower[0], best_z[i] - h);
      hi[i] = std::min(box.upper[0], best_z[i] + h);
    }
  }
  return best;
}

} // namespace

TEST_CASE("separable quadratic on identity dynamics is driven to zero") {
  const DiscreteDynamics dyn = identity(2);
  const ControlBounds box(Vector::Constant(2, -1), Vector::Constant(2, 1));
  const EconomicObjective obj(
      make_stage_cost("quadratic", 2, 2, {{"wu", {1.0, 1.0}}}), 0.0, 1.0);
  Matrix values(2, 6);
  values << 0.9, -0.3, 0.5, 1.0, -1.0, 0.2, -0.7, 0.1, 0.8, -0.4, 0.6, -0.9;
  for (auto method : {SolverMethod::Lbfgs, SolverMethod::ProjectedNewton}) {
    SolverSettings s;
    s.method = method;
    const SolveResult r =
        solve(dyn, obj, Vector::Zero(2), ControlSequence(values, box), s);
    CHECK(r.useq.values().cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(r.cost.total) < 1e-6);
  }
}

TEST_CASE("scalar integrator with quadratic cost matches a refined grid") {
  const auto model = make_model("integrator");
  const DiscreteDynamics dyn(model, 0.1, 1);
  const ControlBounds box(v1(-1), v1(1));
  const EconomicObjective obj(make_stage_cost("quadratic", 1, 1, {{"wx", {1.0}}}),
                              0.0, 0.0);
  for (double x0 : {0.05, -0.12, 0.3}) {
    for (int horizon = 1; horizon <= 3; ++horizon) {
      const double oracle = grid_best(dyn, obj, v1(x0), horizon, box, 5, 40);
      const SolveResult r = solve(dyn, obj, v1(x0),
                                  ControlSequence::constant(horizon, v1(0.5), box));
      CHECK(r.cost.total <= oracle + 1e-6);
      CHECK(r.cost.total >= oracle - 1e-6);
    }
  }
}

TEST_CASE("CSTR open-loop problem converges from the box midpoint") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.01, 0.001);
  const ControlSequence warm = ControlSequence::constant(20, v1(0.249), kCstrBox);
  const Vector x0 = v3(0.5, 0.1, 0.2);
  const SolveResult r = solve(dyn, obj, x0, warm, newton());
  CHECK(r.converged);
  CHECK(r.iterations <= 1000);
  CHECK(r.cost.total <= total_cost(obj, dyn, x0, warm).total);
  CHECK(r.cost.total ==
        doctest::Approx(total_cost(obj, dyn, x0, r.useq).total).epsilon(1e-12));
  CHECK(r.cost.terminal_delta < dyn.delta(x0, warm[0]));
  for (int k = 0; k <= 20; ++k)
    CHECK(kCstrBox.contains(r.useq[k]));
}

TEST_CASE("iterates never increase the cost") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.01, 0.001);
  const Vector x0 = v3(0.5, 0.1, 0.2);
  for (auto s : {SolverSettings{}, newton()}) {
    std::vector<double> costs;
    s.on_iteration = [&](const IterationRecord &rec) { costs.push_back(rec.cost); };
    s.max_iters = 60;
    const auto warm = ControlSequence::constant(20, v1(0.4), kCstrBox);
    const SolveResult r = solve(dyn, obj, x0, warm, s);
    CHECK(r.cost.total <= total_cost(obj, dyn, x0, warm).total);
    for (std::size_t i = 1; i < costs.size(); ++i)
      CHECK(costs[i] <= costs[i - 1]);
  }
}

TEST_CASE("gradient vanishes when nothing depends on the controls") {
  const DiscreteDynamics dyn = identity(3);
  const ControlBounds box(Vector::Constant(3, -1), Vector::Constant(3, 1));
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 3), 0.0, 1.0);
  Matrix values = Matrix::Constant(3, 5, 0.3);
  const ControlSequence u(values, box);
  for (auto mode : {GradientMode::Adjoint, GradientMode::FiniteDifference})
    CHECK(gradient(dyn, obj, v3(1, 2, 3), u, mode).norm() == 0.0);
}

TEST_CASE("adjoint gradient agrees with central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DiscreteDynamics cstr(make_model("cstr"), 0.1, 20);
  const auto stage = make_stage_cost("neg_x2", 3, 1);
  for (int probe = 0; probe < 30; ++probe) {
    const Vector x0 = v3(0.5, 0.1, 0.2) * (0.8 + 0.4 * unit(rng));
    Matrix values(1, 11);
    for (int k = 0; k <= 10; ++k)
      values(0, k) = 0.05 + 0.39 * unit(rng);
    const ControlSequence u(values, kCstrBox);
    const EconomicObjective obj(stage, std::pow(10.0, -3 + 3 * unit(rng)),
                                std::pow(10.0, -3 + 3 * unit(rng)));
    const Vector ga = gradient(cstr, obj, x0, u, GradientMode::Adjoint);
    const Vector gf = gradient(cstr, obj, x0, u, GradientMode::FiniteDifference);
    CHECK((ga - gf).norm() <= 1e-5 * std::max(1.0, gf.norm()));
  }
}

TEST_CASE("terminal control block is zero without alpha and gamma") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.0, 0.0);
  const auto u = ControlSequence::constant(6, v1(0.2), kCstrBox);
  const Vector g = gradient(dyn, obj, v3(0.5, 0.1, 0.2), u, GradientMode::Adjoint);
  CHECK(g[6] == 0.0);
  CHECK(g.head(6).norm() > 0.0);

  const EconomicObjective with_alpha(make_stage_cost("neg_x2", 3, 1), 0.5, 0.0);
  CHECK(gradient(dyn, with_alpha, v3(0.5, 0.1, 0.2), u, GradientMode::Adjoint)[6] ==
        0.0);
  const EconomicObjective both(make_stage_cost("neg_x2", 3, 1), 0.5, 1.0);
  CHECK(gradient(dyn, both, v3(0.5, 0.1, 0.2), u, GradientMode::Adjoint)[6] !=
        0.0);
}

TEST_CASE("projected gradient norm respects active bounds") {
  const auto u = ControlSequence::constant(1, v1(0.049), kCstrBox);
  Vector g(2);
  g << 5.0, 0.0;
  CHECK(projected_gradient_norm(u, g) == 0.0);
  g << -5.0, 0.0;
  CHECK(projected_gradient_norm(u, g) == doctest::Approx(0.4));
}

TEST_CASE("finite-difference mode also solves the problem") {
  const DiscreteDynamics dyn(make_model("integrator"), 0.1, 1);
  const ControlBounds box(v1(-1), v1(1));
  const EconomicObjective obj(make_stage_cost("quadratic", 1, 1, {{"wx", {1.0}}}),
                              0.0, 0.0);
  SolverSettings s;
  s.gradient_mode = GradientMode::FiniteDifference;
  const SolveResult r =
      solve(dyn, obj, v1(0.05), ControlSequence::constant(2, v1(0.0), box), s);
  CHECK(r.cost.total < 0.05 * 0.05 + 1e-9);
  CHECK(r.useq[0][0] == doctest::Approx(-0.5).epsilon(1e-4));
}

TEST_CASE("bad starts and settings are reported") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.01, 0.0);
  const auto warm = ControlSequence::constant(3, v1(0.2), kCstrBox);
  CHECK_THROWS_AS(solve(dyn, obj, v3(1.0, 0.0, -1e-3), warm), SolverStartError);
  SolverSettings s;
  s.max_iters = 0;
  CHECK_THROWS_AS(solve(dyn, obj, v3(0.5, 0.1, 0.2), warm, s), ConfigError);
  CHECK_THROWS_AS(parse_solver_method("simplex"), ConfigError);
  CHECK(parse_gradient_mode("adjoint") == GradientMode::Adjoint);
}
