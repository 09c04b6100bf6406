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
#include "types.hpp"

#include <sstream>

namespace empc {

ControlBounds::ControlBounds(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw ConfigError("control bounds: lower and upper differ in dimension");
  if (!all_finite(lower) || !all_finite(upper))
    throw ConfigError("control bounds must be finite");
  if ((lower.array() > upper.array()).any())
    throw ConfigError("control bounds: lower exceeds upper");
}

bool ControlBounds::contains(const Vector &u) const {
  return u.size() == lower.size() && (u.array() >= lower.array()).all() &&
         (u.array() <= upper.array()).all();
}

Vector ControlBounds::project(const Vector &u) const {
  return u.cwiseMax(lower).cwiseMin(upper);
}

IntegrationError::IntegrationError(const std::string &what, Vector state,
                                   std::optional<int> step)
    : Error(what + " (state " + format_vector(state) + ")"),
      state_(std::move(state)), step_(step) {}

SteadyStateError::SteadyStateError(const std::string &what,
                                   std::vector<double> residuals)
    : Error(what), residuals_(std::move(residuals)) {}

bool all_finite(const Vector &v) { return v.allFinite(); }

std::string format_vector(const Vector &v) {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i)
      os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

} // namespace empc
