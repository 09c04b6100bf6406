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
#ifndef EMPC_MODELS_HPP
#define EMPC_MODELS_HPP

#include "dynamics.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace empc {

using ModelParams = std::map<std::string, double>;

/// Isothermal-feed CSTR with parallel reactions R -> P1, R -> P2.
///
///   x1' = feed - k1 x1^2 exp(-e1/x3) - k2 x1 exp(-e2/x3) - x1
///   x2' = k1 x1^2 exp(-e1/x3) - x2
///   x3' = u - x3
///
/// x1, x2 are the concentrations of R and P1, x3 the temperature and u the
/// heat flow. Defaults are the dimensionless benchmark values.
class CstrModel final : public OdeModel {
public:
  struct Params {
    double feed = 1.0;
    double k1 = 1.0e4;
    double e1 = 1.0;
    double k2 = 400.0;
    double e2 = 0.55;
  };

  CstrModel() = default;
  explicit CstrModel(Params p) : p_(p) {}

  std::string name() const override { return "cstr"; }
  int state_dim() const override { return 3; }
  int control_dim() const override { return 1; }
  using OdeModel::rhs;
  void rhs(const Vector &x, const Vector &u, Vector &dx) const override;
  void jacobians(const Vector &x, const Vector &u, Matrix &fx,
                 Matrix &fu) const override;
  void rhs_and_jacobians(const Vector &x, const Vector &u, Vector &dx,
                         Matrix &fx, Matrix &fu) const override;
  std::optional<Vector> analytic_steady_state(const Vector &u) const override;

  const Params &params() const { return p_; }

private:
  Params p_;
};

/// Diagonal linear system x' = a x + b u with n = m = dim.
///
/// a = b = 0 gives the identity map, a = 0, b = 1 a pure integrator.
class LinearModel final : public OdeModel {
public:
  LinearModel(std::string name, int dim, double a, double b);

  std::string name() const override { return name_; }
  int state_dim() const override { return dim_; }
  int control_dim() const override { return dim_; }
  using OdeModel::rhs;
  void rhs(const Vector &x, const Vector &u, Vector &dx) const override;
  void jacobians(const Vector &x, const Vector &u, Matrix &fx,
                 Matrix &fu) const override;
  std::optional<Vector> analytic_steady_state(const Vector &u) const override;

  double a() const { return a_; }
  double b() const { return b_; }

private:
  std::string name_;
  int dim_;
  double a_;
  double b_;
};

/// Builds a model by registry name: "cstr", "integrator", "linear-test".
/// Unknown names or parameters throw ConfigError.
std::shared_ptr<const OdeModel> make_model(const std::string &name,
                                           const ModelParams &params = {});

std::vector<std::string> model_names();

/// Default admissible input box for a registered model.
ControlBounds default_bounds(const std::string &name, int control_dim);

} // namespace empc

#endif // EMPC_MODELS_HPP
