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
#ifndef EMPC_TYPES_HPP
#define EMPC_TYPES_HPP

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace empc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// State and control values share a representation; the aliases document
// which space a function argument lives in.
using StateVector = Vector;
using ControlVector = Vector;

/// Compact box of admissible control values.
struct ControlBounds {
  Vector lower;
  Vector upper;

  ControlBounds() = default;
  ControlBounds(Vector lo, Vector hi);

  int dim() const { return static_cast<int>(lower.size()); }
  Vector midpoint() const { return 0.5 * (lower + upper); }
  bool contains(const Vector &u) const;
  Vector project(const Vector &u) const;
};

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, invalid parameters, unknown names.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// The integrator produced a non-finite state.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string &what, Vector state,
                   std::optional<int> step = std::nullopt);

  const Vector &state() const { return state_; }
  // Rollout index at which the failure happened, when known.
  std::optional<int> step() const { return step_; }

private:
  Vector state_;
  std::optional<int> step_;
};

/// No finite-cost point could be found from the warm start.
class SolverStartError : public Error {
public:
  using Error::Error;
};

/// Newton iteration for an equilibrium did not converge.
class SteadyStateError : public Error {
public:
  SteadyStateError(const std::string &what, std::vector<double> residuals);
  const std::vector<double> &residual_history() const { return residuals_; }

private:
  std::vector<double> residuals_;
};

bool all_finite(const Vector &v);
std::string format_vector(const Vector &v);

} // namespace empc

#endif // EMPC_TYPES_HPP
