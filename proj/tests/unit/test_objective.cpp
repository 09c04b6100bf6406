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
#include "objective.hpp"

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

} // namespace

TEST_CASE("economic stage cost at the CSTR steady pair") {
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.0, 0.0);
  CHECK(obj.ell(v3(0.0832, 0.0846, 0.149), v1(0.149)) ==
        doctest::Approx(-0.0846).epsilon(1e-15));
}

TEST_CASE("exact penalty") {
  const auto stage = make_stage_cost("neg_x2", 3, 1);
  const Vector x = v3(0.0832, 0.0846, 0.149);
  const EconomicObjective plain(stage, 0.0, 0.0);

  SoftConstraints none;
  none.a = Matrix(0, 3);
  none.b = Vector(0);
  none.rho = 123.0;
  CHECK(EconomicObjective(stage, 0, 0, none).ell(x, v1(0.149)) ==
        plain.ell(x, v1(0.149)));

  SoftConstraints g;
  g.a = Matrix::Zero(1, 3);
  g.a(0, 0) = 1.0;
  g.b = v1(0.05);
  g.rho = 10.0;
  const EconomicObjective soft(stage, 0, 0, g);
  CHECK(soft.ell(x, v1(0.149)) - plain.ell(x, v1(0.149)) ==
        doctest::Approx(0.332).epsilon(1e-12));
  // Inactive constraint adds nothing.
  CHECK(soft.ell(v3(0.01, 0.0846, 0.149), v1(0.149)) ==
        plain.ell(v3(0.01, 0.0846, 0.149), v1(0.149)));
}

TEST_CASE("constant stage cost sums to N c") {
  const auto stage = make_stage_cost("linear", 3, 1, {{"c", {0.7}}});
  const EconomicObjective obj(stage, 0.0, 0.0);
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const Matrix values = Matrix::Constant(1, 21, 0.3);
  const CostBreakdown c =
      total_cost(obj, dyn, v3(0.5, 0.1, 0.2), ControlSequence(values, kBox));
  CHECK(c.total == doctest::Approx(20 * 0.7).epsilon(1e-14));
}

TEST_CASE("zero cost on identity dynamics for any weights") {
  DiscreteMap map;
  map.state_dim = 3;
  map.control_dim = 1;
  map.map = [](const Vector &x, const Vector &) { return x; };
  const DiscreteDynamics dyn(map, 0.1);
  const EconomicObjective obj(make_stage_cost("zero", 3, 1), 3.0, 7.0);
  Matrix values(1, 6);
  values << 0.1, 0.4, 0.2, 0.3, 0.05, 0.44;
  CHECK(total_cost(obj, dyn, v3(1, 2, 3), ControlSequence(values, kBox)).total ==
        0.0);
}

TEST_CASE("open-loop cost matches an independent summation along the rollout") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.0, 0.0);
  const ControlSequence u = ControlSequence::constant(20, v1(0.149), kBox);
  const CostBreakdown c = total_cost(obj, dyn, v3(0.5, 0.1, 0.2), u);
  // Sum of -x2 over x_0..x_19 with the same RK4 grid.
  CHECK(c.total == doctest::Approx(-3.343101266147952).epsilon(1e-12));
  CHECK(c.running == c.total);
  CHECK(c.terminal_ell == doctest::Approx(-0.11006982394903071).epsilon(1e-12));
}

TEST_CASE("terminal stage carries gamma and alpha") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const EconomicObjective obj(make_stage_cost("neg_x2", 3, 1), 0.5, 2.0);
  const ControlSequence u = ControlSequence::constant(4, v1(0.3), kBox);
  const Vector x0 = v3(0.5, 0.1, 0.2);
  const CostBreakdown c = total_cost(obj, dyn, x0, u);
  const Trajectory t = dyn.rollout(x0, u);
  double running = 0;
  for (int k = 0; k < 4; ++k)
    running += -t[k][1] + 0.5 * dyn.delta(t[k], v1(0.3));
  const double terminal = -t[4][1] + 0.5 * dyn.delta(t[4], v1(0.3));
  CHECK(c.running == doctest::Approx(running).epsilon(1e-13));
  CHECK(c.terminal == doctest::Approx(terminal).epsilon(1e-13));
  CHECK(c.total == doctest::Approx(running + 2.0 * terminal).epsilon(1e-13));
  CHECK(c.terminal_delta == doctest::Approx(dyn.delta(t[4], v1(0.3))));
}

TEST_CASE("constant shift moves J by c (N + gamma)") {
  const DiscreteDynamics dyn(make_model("cstr"), 0.1, 20);
  const Vector x0 = v3(0.5, 0.1, 0.2);
  const ControlSequence u = ControlSequence::constant(20, v1(0.2), kBox);
  const auto stage = make_stage_cost("neg_x2", 3, 1);

  CHECK(shift_invariance_check(EconomicObjective(stage, 0.01, 0.001), dyn, x0,
                               u, 0.0));
  const EconomicObjective g1(stage, 0.01, 1.0);
  CHECK(shift_invariance_check(g1, dyn, x0, u, 1.0));
  CHECK(total_cost(g1.with_shift(1.0), dyn, x0, u).total -
            total_cost(g1, dyn, x0, u).total ==
        doctest::Approx(21.0).epsilon(1e-12));

  const EconomicObjective g2(stage, 0.01, 0.001);
  CHECK(total_cost(g2.with_shift(0.0846), dyn, x0, u).total -
            total_cost(g2, dyn, x0, u).total ==
        doctest::Approx(20.001 * 0.0846).epsilon(1e-12));
}

TEST_CASE("stage cost registry validates parameters") {
  CHECK_THROWS_AS(make_stage_cost("neg_x2", 1, 1), ConfigError);
  CHECK_THROWS_AS(make_stage_cost("nope", 3, 1), ConfigError);
  CHECK_THROWS_AS(make_stage_cost("linear", 3, 1, {{"qx", {1.0}}}),
                  ConfigError);
  CHECK_THROWS_AS(make_stage_cost("quadratic", 3, 1, {{"zz", {1.0}}}),
                  ConfigError);
  CHECK_THROWS_AS(EconomicObjective(make_stage_cost("zero", 3, 1), -1.0, 0.0),
                  ConfigError);
}
