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
#ifndef EMPC_ANALYSIS_HPP
#define EMPC_ANALYSIS_HPP

#include "controller.hpp"
#include "steady.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace empc {

struct QuasiSteadyOptions {
  double tail_fraction = 0.25;
  int min_tail = 20;
  double eps_ell_threshold = 1e-3;
  double eps_delta_threshold = 1e-3;
  // Shift already contained in the logged ell values.
  double ell_shift = 0.0;
  // Increment weight used for the descent slack; ignored when unset.
  std::optional<double> alpha;
};

/// Tail maxima of |l - l_s| and Delta over a closed-loop log.
struct QuasiSteadyReport {
  double eps_ell = 0.0;
  double eps_delta = 0.0;
  int tail_start = 0;
  int tail_length = 0;
  bool stationary = false;
  // Largest Euclidean distance of (x_k, u_k) to z_s over the tail.
  double tail_distance = 0.0;
  // First step from which both thresholds hold to the end; -1 if never.
  int steps_to_threshold = -1;
  // max_k V*_{k+1} - V*_k + (l_k - l_s) + alpha Delta_k, when alpha is set.
  std::optional<double> descent_slack;
  int descent_violations = 0;
};

QuasiSteadyReport quasi_steady(const ClosedLoopLog &log,
                               const SteadyPair &steady,
                               const QuasiSteadyOptions &opts = {});

struct TerminalBoundPoint {
  double alpha = 0.0;
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  double delta_n = 0.0;
  double ell_n_abs = 0.0;
  double j_star = 0.0;
  // Cost of the returned sequence evaluated afresh.
  double j_reevaluated = 0.0;
  bool converged = false;
  std::string status;
  int iterations = 0;
};

/// Least-squares fits Delta*_N ~ c3 / gamma and |l*_N| ~ c4 / gamma at one
/// alpha. Residuals are root-mean-square.
struct TerminalBoundFit {
  double alpha = 0.0;
  int points = 0;
  double c3 = 0.0;
  double c4 = 0.0;
  double residual3 = 0.0;
  double residual4 = 0.0;
  // max/min of gamma * Delta*_N and gamma * |l*_N| over the points.
  double delta_ratio = 0.0;
  double ell_ratio = 0.0;
};

struct TerminalBoundReport {
  std::vector<TerminalBoundPoint> points;
  std::vector<TerminalBoundFit> fits;
};

struct TerminalBoundSettings {
  std::vector<double> alphas;
  std::vector<double> gammas;
  int horizon = 20;
  SolverSettings solver;
  // Constant warm start; empty means the box midpoint.
  ControlVector warm;
};

/// Solves P(x) for every (alpha, gamma). The objective's shift should make
/// l_s = 0 so that |l*_N| measures the distance to the optimal steady cost.
TerminalBoundReport terminal_bound_sweep(const DiscreteDynamics &dyn,
                                         const EconomicObjective &obj,
                                         const ControlBounds &bounds,
                                         const StateVector &x,
                                         const TerminalBoundSettings &s);

struct LemmaOneSample {
  Vector z;
  double ell_alpha_delta = 0.0;
  double delta = 0.0;
  double ell = 0.0; // l(z) - l_s
  double dist_to_zs = 0.0;
};

struct LemmaOneLevel {
  double eps = 0.0;
  int qualifiers = 0;
  double max_delta = 0.0;
  double max_dist = 0.0;
  double min_ell = 0.0;
  double max_ell = 0.0;
};

struct LemmaOneOptions {
  // Sampling box over z = (x, u).
  Vector lower;
  Vector upper;
  int n_samples = 10000;
  std::vector<double> eps_levels{1e-2, 1e-3, 1e-4};
  std::uint64_t seed = 0;
  // Adds z_s itself as the first sample.
  bool include_anchor = true;
  // Below 1, each sample is z_s + s (z - z_s) with z uniform in the box and
  // s log-uniform in [min_scale, 1], which concentrates samples near z_s.
  double min_scale = 1.0;
};

struct LemmaOneReport {
  std::vector<LemmaOneSample> samples;
  // Ordered by decreasing eps.
  std::vector<LemmaOneLevel> levels;
  // Qualifier sets shrink with eps.
  bool nested = false;
  // Maxima of Delta and distance never grow as eps shrinks.
  bool monotone = false;
  // Largest distance at the smallest eps is below the one at the largest.
  bool decreasing_trend = false;
  // max (l_s - l) / Delta over the samples: a lower estimate of the
  // Lipschitz constant the increment weight must exceed.
  double lipschitz_estimate = 0.0;
};

/// Samples z in the box and records which satisfy
/// l(z) - l_s + alpha Delta(z) <= eps for each level.
LemmaOneReport lemma_one_scan(const DiscreteDynamics &dyn,
                              const EconomicObjective &obj,
                              const SteadyPair &steady, double alpha,
                              const LemmaOneOptions &opts);

} // namespace empc

#endif // EMPC_ANALYSIS_HPP
