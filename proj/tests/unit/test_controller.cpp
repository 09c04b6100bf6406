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
#include "controller.hpp"
#include "models.hpp"

#include <doctest.h>

#include <cmath>

using namespace empc;

namespace {

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector v1(double a) { return Vector::Constant(1, a); }

const ControlBounds kBox(v1(0.049), v1(0.449));

EMPCConfig cstr_config(int steps) {
  EMPCConfig c;
  c.horizon = 20;
  c.alpha = 0.01;
  c.gamma = 0.001;
  c.steps = steps;
  c.x0 = v3(0.5, 0.1, 0.2);
  c.solver.method = SolverMethod::ProjectedNewton;
  c.solver.hessian_refresh = 10;
  return c;
}

Controller cstr_controller(const EMPCConfig &c) {
  return Controller(DiscreteDynamics(make_model("cstr"), c.tau_pred, 20),
                    EconomicObjective(make_stage_cost("neg_x2", 3, 1), 0, 0),
                    kBox, c);
}

} // namespace

TEST_CASE("warm-start shift") {
  Matrix abc(1, 3);
  abc << 0.1, 0.2, 0.3;
  const ControlSequence s = warm_start_shift(ControlSequence(abc, kBox));
  CHECK(s.values()(0, 0) == 0.2);
  CHECK(s.values()(0, 1) == 0.3);
  CHECK(s.values()(0, 2) == 0.3);

  const auto c = ControlSequence::constant(7, v1(0.25), kBox);
  CHECK(warm_start_shift(c) == c);

  const auto one = ControlSequence::constant(0, v1(0.3), kBox);
  CHECK(warm_start_shift(one) == one);
}

TEST_CASE("control sequence rejects infeasible values") {
  Matrix bad(1, 2);
  bad << 0.1, 0.9;
  CHECK_THROWS_AS(ControlSequence(bad, kBox), ConfigError);
  const auto c = ControlSequence::constant(1, v1(0.2), kBox);
  Vector z(2);
  z << -3.0, 3.0;
  const auto p = c.with_stacked(z);
  CHECK(p[0][0] == 0.049);
  CHECK(p[1][0] == 0.449);
}

TEST_CASE("quadratic input cost on identity dynamics applies zero") {
  DiscreteMap map;
  map.state_dim = 2;
  map.control_dim = 2;
  map.map = [](const Vector &x, const Vector &) { return x; };
  const DiscreteDynamics dyn(map, 0.1);
  const ControlBounds box(Vector::Constant(2, -1), Vector::Constant(2, 1));
  EMPCConfig c;
  c.horizon = 5;
  c.steps = 3;
  c.x0 = Vector::Constant(2, 0.7);
  const Controller ctl(dyn,
                       EconomicObjective(make_stage_cost("quadratic", 2, 2,
                                                         {{"wu", {1.0, 1.0}}}),
                                         0, 0),
                       box, c);
  const ClosedLoopLog log = simulate(ctl, dyn);
  REQUIRE(log.size() == 3);
  for (const auto &e : log.entries)
    CHECK(e.u.norm() < 1e-6);
}

TEST_CASE("feedback at the steady state stays near u_s") {
  EMPCConfig c = cstr_config(1);
  c.x0 = *CstrModel().analytic_steady_state(v1(0.149));
  c.cold_start = v1(0.149);
  const Controller ctl = cstr_controller(c);
  const auto out = ctl.mpc_step(c.x0);
  CHECK(std::abs(out.u_applied[0] - 0.149) < 5e-3);
}

TEST_CASE("a single step logs one row consistent with the plant") {
  const EMPCConfig c = cstr_config(1);
  const Controller ctl = cstr_controller(c);
  const DiscreteDynamics plant(make_model("cstr"), 0.1, 100);
  const ClosedLoopLog log = simulate(ctl, plant);
  REQUIRE(log.size() == 1);
  const LogEntry &e = log.entries[0];
  CHECK(e.x == c.x0);
  CHECK(kBox.contains(e.u));
  CHECK(log.final_state == plant.step(c.x0, e.u));
  CHECK(e.delta == doctest::Approx(plant.delta(c.x0, e.u)).epsilon(1e-14));
  CHECK(e.ell == -0.1);
  CHECK(e.warm == ctl.cold_start());
}

TEST_CASE("closed-loop runs are bitwise reproducible") {
  const EMPCConfig c = cstr_config(8);
  const Controller ctl = cstr_controller(c);
  const DiscreteDynamics plant(make_model("cstr"), 0.1, 100);
  const ClosedLoopLog a = simulate(ctl, plant);
  const ClosedLoopLog b = simulate(ctl, plant);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.entries[k].x == b.entries[k].x);
    CHECK(a.entries[k].u == b.entries[k].u);
    CHECK(a.entries[k].j_star == b.entries[k].j_star);
    CHECK(a.entries[k].iterations == b.entries[k].iterations);
  }
}

TEST_CASE("warm starts follow the shift rule") {
  const EMPCConfig c = cstr_config(3);
  const Controller ctl = cstr_controller(c);
  const ClosedLoopLog log =
      simulate(ctl, DiscreteDynamics(make_model("cstr"), 0.1, 100));
  REQUIRE(log.size() == 3);
  for (std::size_t k = 1; k < log.size(); ++k)
    CHECK(log.entries[k].warm == warm_start_shift(log.entries[k - 1].useq));
}

TEST_CASE("plant periods must be compatible with the predictor") {
  EMPCConfig c = cstr_config(1);
  c.tau_plant = 0.25;
  CHECK_THROWS_AS(cstr_controller(c), ConfigError);
  c.tau_plant = 0.2;
  CHECK_NOTHROW(cstr_controller(c));
  c.tau_plant = 0.02;
  CHECK_NOTHROW(cstr_controller(c));
  c.x0 = v1(0.1);
  CHECK_THROWS_AS(cstr_controller(c), ConfigError);
}

TEST_CASE("integration failure aborts the run and keeps the partial log") {
  DiscreteMap map;
  map.state_dim = 1;
  map.control_dim = 1;
  map.map = [](const Vector &x, const Vector &u) {
    return Vector(x.array() + u.array());
  };
  const DiscreteDynamics predictor(map, 1.0);
  DiscreteMap broken = map;
  broken.map = [](const Vector &x, const Vector &u) {
    return Vector(x.array() + (x[0] > 1.5 ? NAN : 1.0) + 0.0 * u.array());
  };
  const DiscreteDynamics plant(broken, 1.0);
  const ControlBounds box(v1(-1), v1(1));
  EMPCConfig c;
  c.horizon = 2;
  c.tau_pred = c.tau_plant = 1.0;
  c.steps = 10;
  c.x0 = v1(0.0);
  const Controller ctl(predictor,
                       EconomicObjective(make_stage_cost("zero", 1, 1), 0, 0),
                       box, c);
  const ClosedLoopLog log = simulate(ctl, plant);
  CHECK(log.aborted);
  CHECK(log.size() == 2);
  CHECK(log.abort_reason.find("step 2") != std::string::npos);
}
