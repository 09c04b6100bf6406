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
#ifndef EMPC_CONTROL_SEQUENCE_HPP
#define EMPC_CONTROL_SEQUENCE_HPP

#include "types.hpp"

namespace empc {

/// N+1 control vectors over a horizon of length N, each inside the box.
///
/// Stored column-wise (m x (N+1)) so the stacked decision vector
/// [u_0; u_1; ...; u_N] is a plain view of the storage.
class ControlSequence {
public:
  ControlSequence() = default;
  ControlSequence(Matrix values, ControlBounds bounds);

  /// Every entry equal to `u`.
  static ControlSequence constant(int horizon, const Vector &u,
                                  const ControlBounds &bounds);

  int horizon() const { return static_cast<int>(values_.cols()) - 1; }
  int size() const { return static_cast<int>(values_.cols()); }
  int control_dim() const { return static_cast<int>(values_.rows()); }

  Vector operator[](int k) const { return values_.col(k); }
  auto col(int k) const { return values_.col(k); }

  const Matrix &values() const { return values_; }
  const ControlBounds &bounds() const { return bounds_; }

  Vector stacked() const;
  /// Builds a sequence from a stacked vector; values are projected onto the box.
  ControlSequence with_stacked(const Vector &z) const;

  bool operator==(const ControlSequence &other) const {
    return values_ == other.values_;
  }

private:
  Matrix values_;
  ControlBounds bounds_;
};

/// Receding-horizon warm start: (u_0, ..., u_N) -> (u_1, ..., u_N, u_N).
ControlSequence warm_start_shift(const ControlSequence &useq);

} // namespace empc

#endif // EMPC_CONTROL_SEQUENCE_HPP
