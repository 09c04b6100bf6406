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
#include "control_sequence.hpp"

namespace empc {

ControlSequence::ControlSequence(Matrix values, ControlBounds bounds)
    : values_(std::move(values)), bounds_(std::move(bounds)) {
  if (values_.cols() < 1)
    throw ConfigError("control sequence needs at least one entry");
  if (values_.rows() != bounds_.dim())
    throw ConfigError("control sequence dimension does not match bounds");
  for (int k = 0; k < size(); ++k)
    if (!bounds_.contains(values_.col(k)))
      throw ConfigError("control sequence entry " + std::to_string(k) +
                        " violates bounds: " + format_vector(values_.col(k)));
}

ControlSequence ControlSequence::constant(int horizon, const Vector &u,
                                          const ControlBounds &bounds) {
  if (horizon < 0)
    throw ConfigError("horizon must be non-negative");
  Matrix v(u.size(), horizon + 1);
  v.colwise() = u;
  return ControlSequence(std::move(v), bounds);
}

Vector ControlSequence::stacked() const {
  return Eigen::Map<const Vector>(values_.data(), values_.size());
}

ControlSequence ControlSequence::with_stacked(const Vector &z) const {
  if (z.size() != values_.size())
    throw ConfigError("stacked control vector has wrong length");
  Matrix v = Eigen::Map<const Matrix>(z.data(), values_.rows(), values_.cols());
  for (int k = 0; k < size(); ++k)
    v.col(k) = bounds_.project(v.col(k));
  return ControlSequence(std::move(v), bounds_);
}

ControlSequence warm_start_shift(const ControlSequence &useq) {
  const int n = useq.size();
  Matrix v(useq.control_dim(), n);
  if (n > 1)
    v.leftCols(n - 1) = useq.values().rightCols(n - 1);
  v.col(n - 1) = useq.values().col(n - 1);
  return ControlSequence(std::move(v), useq.bounds());
}

} // namespace empc
