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

#include <cmath>

namespace empc {

void CstrModel::rhs(const Vector &x, const Vector &u, Vector &dx) const {
  const double e1 = std::exp(-p_.e1 / x[2]);
  const double e2 = std::exp(-p_.e2 / x[2]);
  const double r1 = p_.k1 * x[0] * x[0] * e1;
  const double r2 = p_.k2 * x[0] * e2;
  dx[0] = p_.feed - r1 - r2 - x[0];
  dx[1] = r1 - x[1];
  dx[2] = u[0] - x[2];
}

void CstrModel::jacobians(const Vector &x, const Vector &u, Matrix &fx,
                          Matrix &fu) const {
  Vector dx(3);
  rhs_and_jacobians(x, u, dx, fx, fu);
}

void CstrModel::rhs_and_jacobians(const Vector &x, const Vector &u, Vector &dx,
                                  Matrix &fx, Matrix &fu) const {
  const double t2 = x[2] * x[2];
  const double e1 = std::exp(-p_.e1 / x[2]);
  const double e2 = std::exp(-p_.e2 / x[2]);
  const double r1 = p_.k1 * x[0] * x[0] * e1;
  const double r2 = p_.k2 * x[0] * e2;
  dx[0] = p_.feed - r1 - r2 - x[0];
  dx[1] = r1 - x[1];
  dx[2] = u[0] - x[2];

  const double dr1_dx1 = 2.0 * p_.k1 * x[0] * e1;
  const double dr1_dx3 = r1 * p_.e1 / t2;
  const double dr2_dx1 = p_.k2 * e2;
  const double dr2_dx3 = r2 * p_.e2 / t2;
  fx.setZero(3, 3);
  fx(0, 0) = -dr1_dx1 - dr2_dx1 - 1.0;
  fx(0, 2) = -dr1_dx3 - dr2_dx3;
  fx(1, 0) = dr1_dx1;
  fx(1, 1) = -1.0;
  fx(1, 2) = dr1_dx3;
  fx(2, 2) = -1.0;
  fu.setZero(3, 1);
  fu(2, 0) = 1.0;
}

std::optional<Vector> CstrModel::analytic_steady_state(const Vector &u) const {
  if (u.size() != 1 || !(u[0] > 0))
    return std::nullopt;
  // x3 = u; x1 is the positive root of a x1^2 + b x1 - feed = 0, written in
  // the cancellation-free form.
  const double temp = u[0];
  const double a = p_.k1 * std::exp(-p_.e1 / temp);
  const double b = 1.0 + p_.k2 * std::exp(-p_.e2 / temp);
  const double x1 = 2.0 * p_.feed / (b + std::sqrt(b * b + 4.0 * a * p_.feed));
  Vector x(3);
  x << x1, a * x1 * x1, temp;
  return x;
}

LinearModel::LinearModel(std::string name, int dim, double a, double b)
    : name_(std::move(name)), dim_(dim), a_(a), b_(b) {
  if (dim < 1)
    throw ConfigError("linear model: dim must be >= 1");
}

void LinearModel::rhs(const Vector &x, const Vector &u, Vector &dx) const {
  dx = a_ * x + b_ * u;
}

void LinearModel::jacobians(const Vector &x, const Vector &u, Matrix &fx,
                            Matrix &fu) const {
  (void)x;
  (void)u;
  fx = a_ * Matrix::Identity(dim_, dim_);
  fu = b_ * Matrix::Identity(dim_, dim_);
}

std::optional<Vector> LinearModel::analytic_steady_state(const Vector &u) const {
  if (a_ == 0.0)
    return std::nullopt;
  return Vector(-(b_ / a_) * u);
}

namespace {

double take(ModelParams &p, const std::string &key, double fallback) {
  auto it = p.find(key);
  if (it == p.end())
    return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

void reject_leftovers(const std::string &model, const ModelParams &p) {
  if (!p.empty())
    throw ConfigError("model '" + model + "': unknown parameter '" +
                      p.begin()->first + "'");
}

} // namespace

std::shared_ptr<const OdeModel> make_model(const std::string &name,
                                           const ModelParams &params) {
  ModelParams p = params;
  if (name == "cstr") {
    CstrModel::Params cp;
    cp.feed = take(p, "feed", cp.feed);
    cp.k1 = take(p, "k1", cp.k1);
    cp.e1 = take(p, "e1", cp.e1);
    cp.k2 = take(p, "k2", cp.k2);
    cp.e2 = take(p, "e2", cp.e2);
    reject_leftovers(name, p);
    return std::make_shared<CstrModel>(cp);
  }
  if (name == "integrator") {
    const int dim = static_cast<int>(take(p, "dim", 1));
    const double b = take(p, "b", 1.0);
    reject_leftovers(name, p);
    return std::make_shared<LinearModel>(name, dim, 0.0, b);
  }
  if (name == "linear-test") {
    const int dim = static_cast<int>(take(p, "dim", 1));
    const double a = take(p, "a", -1.0);
    const double b = take(p, "b", 1.0);
    reject_leftovers(name, p);
    return std::make_shared<LinearModel>(name, dim, a, b);
  }
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<std::string> model_names() {
  return {"cstr", "integrator", "linear-test"};
}

ControlBounds default_bounds(const std::string &name, int control_dim) {
  if (name == "cstr")
    return ControlBounds(Vector::Constant(1, 0.049), Vector::Constant(1, 0.449));
  return ControlBounds(Vector::Constant(control_dim, -1.0),
                       Vector::Constant(control_dim, 1.0));
}

} // namespace empc
