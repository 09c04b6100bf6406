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
// Acceptance runner: one PASS/FAIL line per criterion.

#include "analysis.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "models.hpp"
#include "steady.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace empc;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RunConfig closed_loop_config(double alpha, double gamma, double tau_plant,
                             double duration) {
  json doc = default_config_document();
  doc["objective"]["alpha"] = alpha;
  doc["objective"]["gamma"] = gamma;
  doc["controller"]["tau_plant"] = tau_plant;
  doc["controller"]["duration"] = duration;
  doc["output"]["dir"] = "acceptance_out";
  return parse_config(doc);
}

struct Run {
  QuasiSteadyReport q;
  double seconds = 0.0;
  std::string error;
};

Run closed_loop(double alpha, double gamma, double tau_plant = 0.1,
                double duration = 30.0) {
  Run r;
  const auto t0 = std::chrono::steady_clock::now();
  const ClosedLoopRun run =
      run_closed_loop(closed_loop_config(alpha, gamma, tau_plant, duration));
  r.seconds = seconds_since(t0);
  if (run.log.aborted)
    r.error = run.log.abort_reason;
  else if (!run.quasi)
    r.error = run.steady_error;
  else
    r.q = *run.quasi;
  return r;
}

std::string describe(const char *label, const Run &r) {
  if (!r.error.empty())
    return std::string(label) + " error: " + r.error;
  return std::string(label) + " eps_delta=" + num(r.q.eps_delta) +
         " eps_ell=" + num(r.q.eps_ell) + " dist=" + num(r.q.tail_distance) +
         " stationary=" + (r.q.stationary ? "yes" : "no") +
         " steps_to_threshold=" + std::to_string(r.q.steps_to_threshold) +
         " (" + num(r.seconds) + " s)";
}

Verdict steady_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = parse_config(default_config_document());
  const Problem p = build_problem(cfg);
  const SteadyPair s = optimal_steady_pair(p.predictor, p.objective, p.bounds);
  const double secs = seconds_since(t0);
  const double xs_ref[3] = {0.0832, 0.0846, 0.149};
  double dx = 0;
  for (int i = 0; i < 3; ++i)
    dx = std::max(dx, std::abs(s.x_s[i] - xs_ref[i]));
  const double du = std::abs(s.u_s[0] - 0.149);
  Verdict v;
  v.pass = du <= 5e-3 && dx <= 2e-3 && s.residual <= 1e-10 && secs < 5.0;
  v.detail = "u_s=" + num(s.u_s[0]) + " max|x_s-ref|=" + num(dx) +
             " residual=" + num(s.residual) + " (" + num(secs) + " s)";
  return v;
}

Verdict pure_economic() {
  const Run r = closed_loop(0.0, 0.0);
  Verdict v;
  v.pass = r.error.empty() && !r.q.stationary && r.q.eps_delta > 1e-2;
  v.detail = describe("(0,0)", r);
  return v;
}

Verdict alpha_threshold() {
  const Run lo = closed_loop(0.001, 0.001);
  const Run hi = closed_loop(0.01, 0.001);
  Verdict v;
  v.pass = lo.error.empty() && hi.error.empty() && !lo.q.stationary &&
           hi.q.stationary && hi.q.eps_delta <= 1e-3 &&
           hi.q.tail_distance < 0.05 && hi.seconds < 300 && lo.seconds < 300;
  v.detail = describe("(0.001,0.001)", lo) + "; " + describe("(0.01,0.001)", hi);
  return v;
}

Verdict precision_ordering() {
  const Run a_coarse = closed_loop(0.01, 0.01, 0.1);
  const Run b_coarse = closed_loop(1.0, 1.0, 0.1);
  const Run a_fine = closed_loop(0.01, 0.01, 0.02);
  const Run b_fine = closed_loop(1.0, 1.0, 0.02);
  Verdict v;
  const bool ok = a_coarse.error.empty() && b_coarse.error.empty() &&
                  a_fine.error.empty() && b_fine.error.empty();
  const bool weights = b_coarse.q.eps_delta < a_coarse.q.eps_delta;
  const bool fine_a = a_fine.q.eps_delta <= a_coarse.q.eps_delta;
  const bool fine_b = b_fine.q.eps_delta <= b_coarse.q.eps_delta;
  v.pass = ok && weights && fine_a && fine_b;
  v.detail = std::string("weight order ") + (weights ? "ok" : "violated") +
             ", tau order (0.01,0.01) " + (fine_a ? "ok" : "violated") +
             ", tau order (1,1) " + (fine_b ? "ok" : "violated") + "; " +
             describe("(0.01,0.01) tau=0.1", a_coarse) + "; " +
             describe("(1,1) tau=0.1", b_coarse) + "; " +
             describe("(0.01,0.01) tau=0.02", a_fine) + "; " +
             describe("(1,1) tau=0.02", b_fine);
  return v;
}

Verdict gamma_robustness() {
  const Run g0 = closed_loop(0.01, 0.0);
  const Run g1 = closed_loop(0.01, 1.0);
  Verdict v;
  v.pass = g0.error.empty() && g1.error.empty() && g0.q.stationary &&
           g1.q.stationary;
  std::string soft = "n/a";
  if (v.pass && g0.q.steps_to_threshold >= 0 && g1.q.steps_to_threshold >= 0)
    soft = g1.q.steps_to_threshold <= 1.2 * g0.q.steps_to_threshold
               ? "ok"
               : "exceeded (soft)";
  v.detail = "20% steps check " + soft + "; " + describe("(0.01,0)", g0) +
             "; " + describe("(0.01,1)", g1);
  return v;
}

Verdict terminal_scaling() {
  const RunConfig cfg = parse_config(default_config_document());
  const Problem p = build_problem(cfg);
  const SteadyPair s = optimal_steady_pair(p.predictor, p.objective, p.bounds);
  TerminalBoundSettings ts;
  ts.alphas = {0.01};
  ts.gammas = {0.1, 1.0, 10.0};
  ts.horizon = cfg.controller.horizon;
  ts.solver = cfg.controller.solver;
  const TerminalBoundReport r =
      terminal_bound_sweep(p.predictor, p.objective.with_shift(-s.ell_s),
                           p.bounds, cfg.controller.x0, ts);
  Verdict v;
  bool ok = r.fits.size() == 1 && r.fits[0].points == 3;
  std::ostringstream d;
  for (const auto &pt : r.points) {
    ok = ok && pt.ok;
    d << "gamma=" << num(pt.gamma) << ": Delta_N=" << num(pt.delta_n)
      << " |l_N-l_s|=" << num(pt.ell_n_abs) << " [" << pt.status << "]; ";
  }
  if (ok) {
    d << "ratios gamma*Delta_N " << num(r.fits[0].delta_ratio)
      << ", gamma*|l_N-l_s| " << num(r.fits[0].ell_ratio);
    ok = r.fits[0].delta_ratio <= 10.0 && r.fits[0].ell_ratio <= 10.0;
  }
  v.pass = ok;
  v.detail = d.str();
  return v;
}

Verdict solver_correctness() {
  std::ostringstream d;
  bool ok = true;
  for (const char *model : {"cstr", "linear-test"}) {
    json doc = default_config_document();
    doc["model"]["name"] = model;
    if (std::string(model) == "linear-test")
      doc["controller"]["horizon"] = 3;
    doc["check"]["gradient_probes"] = 100;
    doc["check"]["brute_horizon"] = 3;
    doc["check"]["brute_grid"] = 11;
    doc["check"]["brute_refinements"] = 12;
    const RunConfig cfg = parse_config(doc);
    const Problem p = build_problem(cfg);
    for (const CheckItem &item : {check_gradients(cfg, p),
                                  check_brute_force(cfg, p),
                                  check_shift_invariance(cfg, p)}) {
      ok = ok && item.passed;
      d << model << "/" << item.name << " " << (item.passed ? "ok" : "FAILED")
        << " (" << item.detail << "); ";
    }
  }
  return {ok, d.str()};
}

Verdict lemma_scan() {
  const RunConfig cfg = parse_config(default_config_document());
  const Problem p = build_problem(cfg);
  const SteadyPair s = optimal_steady_pair(p.predictor, p.objective, p.bounds);
  const CheckItem item = check_lemma_scan(cfg, p, s);
  return {item.passed, item.detail};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
      {"steady oracle", steady_oracle},
      {"pure economic cost is not stationary", pure_economic},
      {"stationarity threshold in alpha", alpha_threshold},
      {"precision ordering", precision_ordering},
      {"gamma = 0 robustness", gamma_robustness},
      {"terminal bound scaling", terminal_scaling},
      {"solver correctness", solver_correctness},
      {"level-set scan", lemma_scan},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception &e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %zu: %s - %s - %s\n", i + 1,
                v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
