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
#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace empc {

QuasiSteadyReport quasi_steady(const ClosedLoopLog &log,
                               const SteadyPair &steady,
                               const QuasiSteadyOptions &opts) {
  if (log.empty())
    throw ConfigError("quasi_steady: empty log");
  if (!(opts.tail_fraction > 0 && opts.tail_fraction <= 1))
    throw ConfigError("quasi_steady: tail_fraction must lie in (0,1]");
  const int n = static_cast<int>(log.size());
  const int tail = std::min(
      n, std::max(opts.min_tail,
                  static_cast<int>(std::ceil(opts.tail_fraction * n))));

  QuasiSteadyReport r;
  r.tail_start = n - tail;
  r.tail_length = tail;
  auto ell_err = [&](const LogEntry &e) {
    return std::abs(e.ell - opts.ell_shift - steady.ell_s);
  };
  for (int k = r.tail_start; k < n; ++k) {
    const LogEntry &e = log.entries[k];
    r.eps_ell = std::max(r.eps_ell, ell_err(e));
    r.eps_delta = std::max(r.eps_delta, e.delta);
    r.tail_distance =
        std::max(r.tail_distance, distance_to_steady(steady, e.x, e.u));
  }
  r.stationary = r.eps_ell <= opts.eps_ell_threshold &&
                 r.eps_delta <= opts.eps_delta_threshold;

  int first = n;
  for (int k = n - 1; k >= 0; --k) {
    const LogEntry &e = log.entries[k];
    if (e.delta > opts.eps_delta_threshold ||
        ell_err(e) > opts.eps_ell_threshold)
      break;
    first = k;
  }
  r.steps_to_threshold = first < n ? first : -1;

  if (opts.alpha && n > 1) {
    double slack = -std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < n; ++k) {
      const LogEntry &e = log.entries[k];
      const double stage0 = e.ell - opts.ell_shift - steady.ell_s +
                            *opts.alpha * e.delta;
      const double phi = log.entries[k + 1].v_star - e.v_star + stage0;
      if (phi > 0)
        ++r.descent_violations;
      slack = std::max(slack, phi);
    }
    r.descent_slack = slack;
  }
  return r;
}

namespace {

TerminalBoundFit fit_bounds(double alpha,
                            const std::vector<TerminalBoundPoint> &pts) {
  TerminalBoundFit f;
  f.alpha = alpha;
  double sw = 0, s3 = 0, s4 = 0;
  double lo3 = std::numeric_limits<double>::infinity(), hi3 = 0;
  double lo4 = lo3, hi4 = 0;
  for (const auto &p : pts) {
    if (!p.ok || p.alpha != alpha)
      continue;
    ++f.points;
    const double w = 1.0 / p.gamma;
    sw += w * w;
    s3 += w * p.delta_n;
    s4 += w * p.ell_n_abs;
    lo3 = std::min(lo3, p.gamma * p.delta_n);
    hi3 = std::max(hi3, p.gamma * p.delta_n);
    lo4 = std::min(lo4, p.gamma * p.ell_n_abs);
    hi4 = std::max(hi4, p.gamma * p.ell_n_abs);
  }
  if (f.points == 0)
    return f;
  f.c3 = s3 / sw;
  f.c4 = s4 / sw;
  double r3 = 0, r4 = 0;
  for (const auto &p : pts) {
    if (!p.ok || p.alpha != alpha)
      continue;
    r3 += std::pow(p.delta_n - f.c3 / p.gamma, 2);
    r4 += std::pow(p.ell_n_abs - f.c4 / p.gamma, 2);
  }
  f.residual3 = std::sqrt(r3 / f.points);
  f.residual4 = std::sqrt(r4 / f.points);
  const double inf = std::numeric_limits<double>::infinity();
  f.delta_ratio = lo3 > 0 ? hi3 / lo3 : (hi3 > 0 ? inf : 1.0);
  f.ell_ratio = lo4 > 0 ? hi4 / lo4 : (hi4 > 0 ? inf : 1.0);
  return f;
}

} // namespace

TerminalBoundReport terminal_bound_sweep(const DiscreteDynamics &dyn,
                                         const EconomicObjective &obj,
                                         const ControlBounds &bounds,
                                         const StateVector &x,
                                         const TerminalBoundSettings &s) {
  std::vector<double> distinct = s.gammas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3 || distinct.front() <= 0)
    throw ConfigError(
        "terminal_bound_sweep: need at least 3 distinct positive gammas");
  if (s.alphas.empty())
    throw ConfigError("terminal_bound_sweep: no alpha values");
  const ControlVector u0 = s.warm.size() ? s.warm : bounds.midpoint();
  const ControlSequence warm = ControlSequence::constant(s.horizon, u0, bounds);

  TerminalBoundReport report;
  for (double alpha : s.alphas) {
    for (double gamma : s.gammas) {
      TerminalBoundPoint p;
      p.alpha = alpha;
      p.gamma = gamma;
      try {
        const EconomicObjective o = obj.with_weights(alpha, gamma);
        const SolveResult r = solve(dyn, o, x, warm, s.solver);
        p.delta_n = r.cost.terminal_delta;
        p.ell_n_abs = std::abs(r.cost.terminal_ell);
        p.j_star = r.cost.total;
        p.j_reevaluated = total_cost(o, dyn, x, r.useq).total;
        p.converged = r.converged;
        p.status = r.status;
        p.iterations = r.iterations;
        p.ok = true;
      } catch (const Error &e) {
        p.error = e.what();
      }
      report.points.push_back(std::move(p));
    }
  }
  for (double alpha : s.alphas)
    if (std::none_of(report.fits.begin(), report.fits.end(),
                     [&](const TerminalBoundFit &f) { return f.alpha == alpha; }))
      report.fits.push_back(fit_bounds(alpha, report.points));
  return report;
}

LemmaOneReport lemma_one_scan(const DiscreteDynamics &dyn,
                              const EconomicObjective &obj,
                              const SteadyPair &steady, double alpha,
                              const LemmaOneOptions &opts) {
  const int n = dyn.state_dim(), m = dyn.control_dim();
  if (!(alpha > 0))
    throw ConfigError("lemma_one_scan: alpha must be positive");
  if (opts.lower.size() != n + m || opts.upper.size() != n + m ||
      (opts.upper - opts.lower).minCoeff() < 0)
    throw ConfigError("lemma_one_scan: sampling box must have dimension n+m");
  if (opts.n_samples < 1 || opts.eps_levels.empty())
    throw ConfigError("lemma_one_scan: need samples and eps levels");
  if (!(opts.min_scale > 0 && opts.min_scale <= 1))
    throw ConfigError("lemma_one_scan: min_scale must lie in (0,1]");

  LemmaOneReport report;
  auto record = [&](const Vector &z) {
    LemmaOneSample s;
    s.z = z;
    const Vector x = z.head(n), u = z.tail(m);
    s.ell = obj.ell_unshifted(x, u) - steady.ell_s;
    s.delta = dyn.delta(x, u);
    s.ell_alpha_delta = s.ell + alpha * s.delta;
    s.dist_to_zs = distance_to_steady(steady, x, u);
    report.samples.push_back(std::move(s));
  };
  if (opts.include_anchor) {
    Vector z(n + m);
    z << steady.x_s, steady.u_s;
    record(z);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector centre(n + m);
  centre << steady.x_s, steady.u_s;
  centre = centre.cwiseMax(opts.lower).cwiseMin(opts.upper);
  const double log_min = std::log(opts.min_scale);
  Vector z(n + m);
  for (int i = 0; i < opts.n_samples; ++i) {
    for (int j = 0; j < n + m; ++j)
      z[j] = opts.lower[j] + (opts.upper[j] - opts.lower[j]) * unit(rng);
    if (opts.min_scale < 1)
      z = centre + std::exp(log_min * unit(rng)) * (z - centre);
    try {
      record(z);
    } catch (const IntegrationError &) {
      // Points where the period map blows up cannot qualify.
    }
  }

  for (const auto &s : report.samples)
    if (s.delta > 0)
      report.lipschitz_estimate =
          std::max(report.lipschitz_estimate, -s.ell / s.delta);

  std::vector<double> eps = opts.eps_levels;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<std::vector<char>> member;
  for (double e : eps) {
    LemmaOneLevel lv;
    lv.eps = e;
    lv.min_ell = std::numeric_limits<double>::infinity();
    lv.max_ell = -std::numeric_limits<double>::infinity();
    std::vector<char> in(report.samples.size(), 0);
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
      const auto &s = report.samples[i];
      if (!(s.ell_alpha_delta <= e))
        continue;
      in[i] = 1;
      ++lv.qualifiers;
      lv.max_delta = std::max(lv.max_delta, s.delta);
      lv.max_dist = std::max(lv.max_dist, s.dist_to_zs);
      lv.min_ell = std::min(lv.min_ell, s.ell);
      lv.max_ell = std::max(lv.max_ell, s.ell);
    }
    member.push_back(std::move(in));
    report.levels.push_back(lv);
  }

  report.nested = true;
  report.monotone = true;
  for (std::size_t l = 1; l < member.size(); ++l) {
    for (std::size_t i = 0; i < member[l].size(); ++i)
      if (member[l][i] && !member[l - 1][i])
        report.nested = false;
    const auto &a = report.levels[l - 1], &b = report.levels[l];
    if (b.max_delta > a.max_delta || b.max_dist > a.max_dist)
      report.monotone = false;
  }
  report.decreasing_trend =
      report.levels.back().max_dist < report.levels.front().max_dist;
  return report;
}

} // namespace empc
