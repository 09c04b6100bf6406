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
#include "commands.hpp"

#include "io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace empc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

std::vector<double> vec(const Vector &v) {
  return {v.data(), v.data() + v.size()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_rows(const std::string &path, const std::vector<std::string> &header,
                const std::vector<std::vector<std::string>> &rows) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto &r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ControlSequence initial_sequence(const RunConfig &cfg, const Problem &p,
                                 int horizon) {
  const ControlVector u = cfg.controller.cold_start.size()
                              ? cfg.controller.cold_start
                              : p.bounds.midpoint();
  return ControlSequence::constant(horizon, u, p.bounds);
}

SteadyPair steady_pair(const RunConfig &cfg, const Problem &p) {
  return optimal_steady_pair(p.predictor, p.objective, p.bounds, cfg.steady);
}

} // namespace

std::vector<std::string> command_names() {
  return {"steady", "openloop", "closedloop", "sweep", "check", "plot-export"};
}

CommandResult cmd_steady(const RunConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg);
  const SteadyPair s = steady_pair(cfg, p);
  ensure_directory(cfg.output_dir);
  CommandResult r;
  r.report = to_json(s);
  json doc = run_metadata(cfg.document, "steady", seconds_since(t0));
  doc["steady"] = r.report;
  const std::string path = join(cfg.output_dir, "steady.json");
  write_json(path, doc);
  r.outputs.push_back(path);
  std::ostringstream os;
  os << "model     " << cfg.model_name << "\n"
     << "u_s       " << format_vector(s.u_s) << "\n"
     << "x_s       " << format_vector(s.x_s) << "\n"
     << "ell_s     " << fmt(s.ell_s) << "\n"
     << "residual  " << fmt(s.residual) << "\n";
  if (s.skipped_points)
    os << "skipped   " << s.skipped_points << " grid points\n";
  r.summary = os.str();
  return r;
}

CommandResult cmd_openloop(const RunConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg);
  const int horizon = cfg.controller.horizon;
  SolverSettings settings = cfg.controller.solver;
  std::vector<std::vector<double>> trace;
  settings.on_iteration = [&](const IterationRecord &it) {
    trace.push_back({static_cast<double>(it.iteration), it.cost,
                     it.projected_grad_norm, it.step});
  };
  const ControlSequence warm = initial_sequence(cfg, p, horizon);
  const SolveResult res =
      solve(p.predictor, p.objective, cfg.controller.x0, warm, settings);

  ensure_directory(cfg.output_dir);
  CommandResult r;
  const std::string trace_path = join(cfg.output_dir, "openloop_trace.csv");
  write_csv(trace_path, {"iteration", "cost", "projected_grad_norm", "step"},
            trace);
  const Trajectory xs = p.predictor.rollout(cfg.controller.x0, res.useq);
  const int n = p.predictor.state_dim(), m = p.predictor.control_dim();
  std::vector<std::string> header{"k"};
  for (int i = 0; i < n; ++i)
    header.push_back("x" + std::to_string(i));
  for (int j = 0; j < m; ++j)
    header.push_back("u" + std::to_string(j));
  header.insert(header.end(), {"ell", "delta"});
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= horizon; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (double v : vec(xs[k]))
      row.push_back(v);
    for (double v : vec(res.useq[k]))
      row.push_back(v);
    const StageValue sv = stage(p.objective, p.predictor, xs[k], res.useq[k]);
    row.push_back(sv.ell);
    row.push_back(sv.delta);
    rows.push_back(std::move(row));
  }
  const std::string seq_path = join(cfg.output_dir, "openloop.csv");
  write_csv(seq_path, header, rows);

  r.report = {{"J_star", res.cost.total},
              {"V_star", res.cost.running},
              {"Psi_star", res.cost.terminal},
              {"delta_N_star", res.cost.terminal_delta},
              {"ell_N_star", res.cost.terminal_ell},
              {"iterations", res.iterations},
              {"converged", res.converged},
              {"status", res.status},
              {"projected_grad_norm", res.projected_grad_norm},
              {"cost_evaluations", res.cost_evaluations}};
  json doc = run_metadata(cfg.document, "openloop", seconds_since(t0));
  doc["result"] = r.report;
  const std::string meta_path = join(cfg.output_dir, "openloop.meta.json");
  write_json(meta_path, doc);
  r.outputs = {seq_path, trace_path, meta_path};
  std::ostringstream os;
  os << "J*          " << fmt(res.cost.total) << "\n"
     << "V*          " << fmt(res.cost.running) << "\n"
     << "Psi*        " << fmt(res.cost.terminal) << "\n"
     << "Delta*_N    " << fmt(res.cost.terminal_delta) << "\n"
     << "ell*_N      " << fmt(res.cost.terminal_ell) << "\n"
     << "iterations  " << res.iterations << " (" << res.status << ")\n"
     << "u*_0        " << format_vector(res.useq[0]) << "\n";
  r.summary = os.str();
  return r;
}

ClosedLoopRun run_closed_loop(const RunConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg);
  ClosedLoopRun run;
  const Controller controller(p.predictor, p.objective, p.bounds,
                              cfg.controller);
  run.log = simulate(controller, p.plant);
  try {
    run.steady = steady_pair(cfg, p);
  } catch (const Error &e) {
    run.steady_error = e.what();
  }
  if (run.steady && !run.log.empty())
    run.quasi = quasi_steady(run.log, *run.steady, cfg.quasi);
  run.wall_seconds = seconds_since(t0);
  return run;
}

namespace {

json closed_loop_report(const ClosedLoopRun &run) {
  json j;
  j["steps_completed"] = run.log.size();
  j["aborted"] = run.log.aborted;
  j["abort_reason"] = run.log.abort_reason;
  std::map<std::string, int> statuses;
  for (const auto &e : run.log.entries)
    ++statuses[e.status];
  j["solver_status_counts"] = statuses;
  j["steady"] = run.steady ? to_json(*run.steady) : json();
  if (!run.steady_error.empty())
    j["steady_error"] = run.steady_error;
  j["quasi_steady"] = run.quasi ? to_json(*run.quasi) : json();
  return j;
}

std::string closed_loop_summary(const ClosedLoopRun &run) {
  std::ostringstream os;
  os << "steps       " << run.log.size() << "\n";
  if (run.log.aborted)
    os << "ABORTED     " << run.log.abort_reason << "\n";
  if (!run.log.empty()) {
    const LogEntry &last = run.log.entries.back();
    os << "final x     " << format_vector(last.x) << "\n"
       << "final u     " << format_vector(last.u) << "\n";
  }
  if (run.quasi) {
    const QuasiSteadyReport &q = *run.quasi;
    os << "tail        steps " << q.tail_start << ".." << run.log.size() - 1
       << "\n"
       << "eps_ell     " << fmt(q.eps_ell) << "\n"
       << "eps_delta   " << fmt(q.eps_delta) << "\n"
       << "distance    " << fmt(q.tail_distance) << "\n"
       << "stationary  " << (q.stationary ? "yes" : "no") << "\n"
       << "threshold   "
       << (q.steps_to_threshold >= 0 ? std::to_string(q.steps_to_threshold)
                                     : std::string("never"))
       << "\n";
  } else if (!run.steady_error.empty()) {
    os << "no steady pair: " << run.steady_error << "\n";
  }
  os << "wall        " << fmt(run.wall_seconds) << " s\n";
  return os.str();
}

std::vector<std::string> write_closed_loop(const RunConfig &cfg,
                                           const ClosedLoopRun &run,
                                           const std::string &command) {
  ensure_directory(cfg.output_dir);
  const Problem p = build_problem(cfg);
  const std::string csv = join(cfg.output_dir, "closedloop.csv");
  write_closed_loop_csv(csv, run.log, p.predictor.state_dim(),
                        p.predictor.control_dim());
  json doc = run_metadata(cfg.document, command, run.wall_seconds);
  doc["report"] = closed_loop_report(run);
  const std::string meta = join(cfg.output_dir, "closedloop.meta.json");
  write_json(meta, doc);
  return {csv, meta};
}

} // namespace

CommandResult cmd_closedloop(const RunConfig &cfg) {
  const ClosedLoopRun run = run_closed_loop(cfg);
  CommandResult r;
  r.outputs = write_closed_loop(cfg, run, "closedloop");
  r.report = closed_loop_report(run);
  r.summary = closed_loop_summary(run);
  if (run.log.aborted)
    r.exit_code = kExitRuntime;
  return r;
}

namespace {

std::string point_name(double alpha, double gamma, double tau) {
  return "a" + fmt(alpha) + "_g" + fmt(gamma) + "_t" + fmt(tau);
}

CommandResult sweep_closed_loop(const RunConfig &cfg) {
  const auto axis = [](const std::vector<double> &v, double fallback) {
    return v.empty() ? std::vector<double>{fallback} : v;
  };
  const auto alphas = axis(cfg.sweep.alphas, cfg.controller.alpha);
  const auto gammas = axis(cfg.sweep.gammas, cfg.controller.gamma);
  const auto taus = axis(cfg.sweep.tau_plants, cfg.controller.tau_plant);

  struct Point {
    double alpha, gamma, tau;
    std::string name;
    std::optional<RunConfig> cfg;
    std::optional<ClosedLoopRun> run;
    std::string error;
  };
  std::vector<std::pair<double, double>> weights = cfg.sweep.pairs;
  if (weights.empty())
    for (double a : alphas)
      for (double g : gammas)
        weights.emplace_back(a, g);
  std::vector<Point> points;
  for (const auto &[a, g] : weights)
    for (double t : taus) {
      Point pt{a, g, t, point_name(a, g, t), {}, {}, {}};
      json doc = cfg.document;
      doc["objective"]["alpha"] = a;
      doc["objective"]["gamma"] = g;
      doc["controller"]["tau_plant"] = t;
      doc["sweep"]["alphas"] = json::array();
      doc["sweep"]["gammas"] = json::array();
      doc["sweep"]["pairs"] = json::array();
      doc["sweep"]["tau_plants"] = json::array();
      doc["output"]["dir"] = join(cfg.output_dir, pt.name);
      pt.cfg = parse_config(doc);
      points.push_back(std::move(pt));
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      Point &pt = points[i];
      try {
        pt.run = run_closed_loop(*pt.cfg);
        write_closed_loop(*pt.cfg, *pt.run, "sweep");
      } catch (const std::exception &e) {
        pt.error = e.what();
      }
    }
  };
  const int workers = std::min<int>(cfg.sweep.workers,
                                    static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  CommandResult r;
  std::vector<std::vector<std::string>> rows;
  std::ostringstream os;
  os << "run                          stationary  eps_delta     eps_ell       "
        "distance      threshold\n";
  int failed = 0;
  for (const Point &pt : points) {
    json item{{"name", pt.name},
              {"alpha", pt.alpha},
              {"gamma", pt.gamma},
              {"tau_plant", pt.tau}};
    const bool ok = pt.run && !pt.run->log.aborted && pt.error.empty();
    if (!ok)
      ++failed;
    std::vector<std::string> row{pt.name, full(pt.alpha), full(pt.gamma),
                                 full(pt.tau)};
    if (pt.run) {
      item["report"] = closed_loop_report(*pt.run);
      const auto &q = pt.run->quasi;
      row.push_back(std::to_string(pt.run->log.size()));
      row.push_back(pt.run->log.aborted ? "1" : "0");
      row.push_back(q ? (q->stationary ? "1" : "0") : "");
      row.push_back(q ? full(q->eps_ell) : "");
      row.push_back(q ? full(q->eps_delta) : "");
      row.push_back(q ? full(q->tail_distance) : "");
      row.push_back(q ? std::to_string(q->steps_to_threshold) : "");
      char line[160];
      std::snprintf(line, sizeof line, "%-28s %-11s %-13s %-13s %-13s %s\n",
                    pt.name.c_str(),
                    q ? (q->stationary ? "yes" : "no") : "?",
                    q ? fmt(q->eps_delta).c_str() : "-",
                    q ? fmt(q->eps_ell).c_str() : "-",
                    q ? fmt(q->tail_distance).c_str() : "-",
                    q ? std::to_string(q->steps_to_threshold).c_str() : "-");
      os << line;
    } else {
      item["error"] = pt.error;
      row.insert(row.end(), {"0", "1", "", "", "", "", ""});
      os << pt.name << "  FAILED: " << pt.error << "\n";
    }
    r.report["runs"].push_back(item);
    rows.push_back(std::move(row));
  }
  ensure_directory(cfg.output_dir);
  const std::string table = join(cfg.output_dir, "sweep.csv");
  write_rows(table,
             {"name", "alpha", "gamma", "tau_plant", "steps", "aborted",
              "stationary", "eps_ell", "eps_delta", "tail_distance",
              "steps_to_threshold"},
             rows);
  r.outputs.push_back(table);
  for (const Point &pt : points)
    if (pt.run)
      r.outputs.push_back(join(pt.cfg->output_dir, "closedloop.csv"));
  r.summary = os.str();
  if (failed == static_cast<int>(points.size()))
    r.exit_code = kExitRuntime;
  return r;
}

CommandResult sweep_terminal_bound(const RunConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg);
  const SteadyPair s = steady_pair(cfg, p);
  TerminalBoundSettings ts;
  ts.alphas = cfg.sweep.alphas.empty()
                  ? std::vector<double>{cfg.controller.alpha}
                  : cfg.sweep.alphas;
  ts.gammas = cfg.sweep.gammas;
  ts.horizon = cfg.controller.horizon;
  ts.solver = cfg.controller.solver;
  ts.warm = cfg.controller.cold_start;
  const TerminalBoundReport rep = terminal_bound_sweep(
      p.predictor, p.objective.with_shift(-s.ell_s), p.bounds,
      cfg.controller.x0, ts);

  CommandResult r;
  std::vector<std::vector<std::string>> rows;
  int failed = 0;
  for (const auto &pt : rep.points) {
    failed += !pt.ok;
    rows.push_back({full(pt.alpha), full(pt.gamma), pt.ok ? "1" : "0",
                    full(pt.delta_n), full(pt.ell_n_abs),
                    full(pt.gamma * pt.delta_n), full(pt.gamma * pt.ell_n_abs),
                    full(pt.j_star), full(pt.j_reevaluated),
                    pt.converged ? "1" : "0", std::to_string(pt.iterations)});
    r.report["points"].push_back({{"alpha", pt.alpha},
                                  {"gamma", pt.gamma},
                                  {"ok", pt.ok},
                                  {"error", pt.error},
                                  {"delta_N_star", pt.delta_n},
                                  {"ell_N_abs", pt.ell_n_abs},
                                  {"J_star", pt.j_star},
                                  {"J_reevaluated", pt.j_reevaluated},
                                  {"converged", pt.converged},
                                  {"status", pt.status},
                                  {"iterations", pt.iterations}});
  }
  std::vector<std::vector<std::string>> fit_rows;
  std::ostringstream os;
  os << "ell_s = " << fmt(s.ell_s) << " (ell measured relative to it)\n";
  for (const auto &f : rep.fits) {
    fit_rows.push_back({full(f.alpha), std::to_string(f.points), full(f.c3),
                        full(f.c4), full(f.residual3), full(f.residual4),
                        full(f.delta_ratio), full(f.ell_ratio)});
    r.report["fits"].push_back({{"alpha", f.alpha},
                                {"points", f.points},
                                {"c3", f.c3},
                                {"c4", f.c4},
                                {"residual3", f.residual3},
                                {"residual4", f.residual4},
                                {"delta_ratio", f.delta_ratio},
                                {"ell_ratio", f.ell_ratio}});
    os << "alpha " << fmt(f.alpha) << ": c3 = " << fmt(f.c3)
       << ", c4 = " << fmt(f.c4) << ", max/min gamma*Delta_N = "
       << fmt(f.delta_ratio) << ", max/min gamma*|ell_N| = "
       << fmt(f.ell_ratio) << "\n";
  }
  for (const auto &pt : rep.points)
    os << "  alpha " << fmt(pt.alpha) << " gamma " << fmt(pt.gamma) << ": "
       << (pt.ok ? "Delta_N = " + fmt(pt.delta_n) +
                       ", |ell_N| = " + fmt(pt.ell_n_abs) + " (" + pt.status +
                       ")"
                 : "FAILED " + pt.error)
       << "\n";
  ensure_directory(cfg.output_dir);
  const std::string pts = join(cfg.output_dir, "terminal_bound.csv");
  write_rows(pts,
             {"alpha", "gamma", "ok", "delta_N_star", "ell_N_abs",
              "gamma_delta_N", "gamma_ell_N", "J_star", "J_reevaluated",
              "converged", "iterations"},
             rows);
  const std::string fits = join(cfg.output_dir, "terminal_bound_fit.csv");
  write_rows(fits,
             {"alpha", "points", "c3", "c4", "residual3", "residual4",
              "delta_ratio", "ell_ratio"},
             fit_rows);
  json doc = run_metadata(cfg.document, "sweep", seconds_since(t0));
  doc["report"] = r.report;
  doc["steady"] = to_json(s);
  const std::string meta = join(cfg.output_dir, "terminal_bound.meta.json");
  write_json(meta, doc);
  r.outputs = {pts, fits, meta};
  r.summary = os.str();
  if (failed == static_cast<int>(rep.points.size()))
    r.exit_code = kExitRuntime;
  return r;
}

} // namespace

CommandResult cmd_sweep(const RunConfig &cfg) {
  return cfg.sweep.mode == "terminal-bound" ? sweep_terminal_bound(cfg)
                                            : sweep_closed_loop(cfg);
}

CheckItem check_gradients(const RunConfig &cfg, const Problem &p) {
  CheckItem item;
  item.name = "gradient";
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = p.predictor.state_dim(), m = p.predictor.control_dim();
  const int horizon = cfg.controller.horizon;
  double worst = 0.0;
  int probes = 0, skipped = 0;
  while (probes < cfg.check.gradient_probes) {
    if (skipped > 10 * cfg.check.gradient_probes)
      throw Error("gradient check: too many probes failed to integrate");
    Vector x0 = cfg.controller.x0;
    for (int i = 0; i < n; ++i)
      x0[i] = x0[i] != 0.0 ? x0[i] * (0.8 + 0.4 * unit(rng))
                           : 2.0 * unit(rng) - 1.0;
    Matrix values(m, horizon + 1);
    for (int k = 0; k <= horizon; ++k)
      for (int j = 0; j < m; ++j)
        values(j, k) = p.bounds.lower[j] +
                       (p.bounds.upper[j] - p.bounds.lower[j]) * unit(rng);
    const double alpha = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    const double gamma = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    const EconomicObjective obj = p.objective.with_weights(alpha, gamma);
    const ControlSequence u(values, p.bounds);
    try {
      const Vector ga =
          gradient(p.predictor, obj, x0, u, GradientMode::Adjoint);
      const Vector gf = gradient(p.predictor, obj, x0, u,
                                 GradientMode::FiniteDifference,
                                 cfg.check.fd_step);
      const double scale = gf.norm();
      const double err = (ga - gf).norm();
      const double rel = scale > 0 ? err / scale : err;
      worst = std::max(worst, rel);
      ++probes;
    } catch (const IntegrationError &) {
      ++skipped;
    }
  }
  item.passed = worst <= cfg.check.gradient_tol;
  item.detail = std::to_string(probes) + " probes, max relative error " +
                fmt(worst) + " (tolerance " + fmt(cfg.check.gradient_tol) +
                ")";
  item.data = {{"probes", probes},
               {"skipped", skipped},
               {"max_relative_error", worst},
               {"tolerance", cfg.check.gradient_tol},
               {"fd_step", cfg.check.fd_step}};
  return item;
}

CheckItem check_shift_invariance(const RunConfig &cfg, const Problem &p) {
  CheckItem item;
  item.name = "shift-invariance";
  const double c = cfg.check.shift;
  const int horizon = cfg.controller.horizon;
  const StateVector &x0 = cfg.controller.x0;
  const ControlSequence warm = initial_sequence(cfg, p, horizon);

  bool cost_ok = true;
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = p.predictor.control_dim();
  for (int probe = 0; probe < 10; ++probe) {
    Matrix values(m, horizon + 1);
    for (int k = 0; k <= horizon; ++k)
      for (int j = 0; j < m; ++j)
        values(j, k) = p.bounds.lower[j] +
                       (p.bounds.upper[j] - p.bounds.lower[j]) * unit(rng);
    cost_ok = cost_ok && shift_invariance_check(p.objective, p.predictor, x0,
                                                ControlSequence(values, p.bounds),
                                                c);
  }

  const SolveResult a =
      solve(p.predictor, p.objective, x0, warm, cfg.controller.solver);
  const EconomicObjective shifted =
      p.objective.with_shift(p.objective.ell_shift() + c);
  const SolveResult b =
      solve(p.predictor, shifted, x0, warm, cfg.controller.solver);
  const double du = (a.useq.stacked() - b.useq.stacked()).lpNorm<Eigen::Infinity>();
  const double expected = c * (horizon + p.objective.gamma());
  const double dj = std::abs(b.cost.total - a.cost.total - expected);
  // Unshifted optimal cost of the shifted problem vs the original optimum.
  const double cost_gap = std::abs(total_cost(p.objective, p.predictor, x0,
                                              b.useq).total -
                                   a.cost.total);
  item.passed = cost_ok && du <= cfg.check.shift_tol &&
                cost_gap <= cfg.check.brute_tol;
  item.detail = "cost offset exact on 10 probes: " +
                std::string(cost_ok ? "yes" : "no") +
                "; argmin difference " + fmt(du) + " (tolerance " +
                fmt(cfg.check.shift_tol) + "); optimal cost gap " +
                fmt(cost_gap);
  item.data = {{"shift", c},
               {"cost_offset_exact", cost_ok},
               {"argmin_max_abs_difference", du},
               {"optimal_cost_gap", cost_gap},
               {"offset_error", dj},
               {"status_unshifted", a.status},
               {"status_shifted", b.status}};
  return item;
}

CheckItem check_brute_force(const RunConfig &cfg, const Problem &p) {
  CheckItem item;
  item.name = "brute-force";
  if (p.predictor.control_dim() != 1) {
    item.passed = true;
    item.detail = "skipped: needs a scalar input";
    item.data = {{"skipped", true}};
    return item;
  }
  const StateVector &x0 = cfg.controller.x0;
  const int g = cfg.check.brute_grid;
  bool all_ok = true;
  std::ostringstream detail;
  for (int horizon = 1; horizon <= cfg.check.brute_horizon; ++horizon) {
    const int d = horizon + 1;
    Vector lo = Vector::Constant(d, p.bounds.lower[0]);
    Vector hi = Vector::Constant(d, p.bounds.upper[0]);
    Vector best_z = Vector::Constant(d, p.bounds.midpoint()[0]);
    double best = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    Matrix values(1, d);
    for (int round = 0; round <= cfg.check.brute_refinements; ++round) {
      std::vector<int> idx(d, 0);
      const Vector cell = (hi - lo) / (g - 1);
      for (;;) {
        for (int i = 0; i < d; ++i)
          values(0, i) = lo[i] + cell[i] * idx[i];
        double j;
        try {
          j = total_cost(p.objective, p.predictor, x0,
                         ControlSequence(values, p.bounds))
                  .total;
        } catch (const IntegrationError &) {
          j = std::numeric_limits<double>::infinity();
        }
        ++evaluations;
        if (j < best) {
          best = j;
          best_z = values.row(0).transpose();
        }
        int i = 0;
        while (i < d && ++idx[i] == g)
          idx[i++] = 0;
        if (i == d)
          break;
      }
      for (int i = 0; i < d; ++i) {
        lo[i] = std::max(p.bounds.lower[0], best_z[i] - 2 * cell[i]);
        hi[i] = std::min(p.bounds.upper[0], best_z[i] + 2 * cell[i]);
      }
    }
    const SolveResult res =
        solve(p.predictor, p.objective, x0, initial_sequence(cfg, p, horizon),
              cfg.controller.solver);
    const double gap = res.cost.total - best;
    const bool ok = std::abs(gap) <= cfg.check.brute_tol;
    all_ok = all_ok && ok;
    detail << "N=" << horizon << ": solver " << fmt(res.cost.total)
           << " vs grid " << fmt(best) << " (gap " << fmt(gap) << "); ";
    item.data["instances"].push_back({{"horizon", horizon},
                                      {"solver_cost", res.cost.total},
                                      {"grid_cost", best},
                                      {"gap", gap},
                                      {"grid_argmin", vec(best_z)},
                                      {"solver_argmin", vec(res.useq.stacked())},
                                      {"evaluations", evaluations},
                                      {"status", res.status},
                                      {"passed", ok}});
  }
  item.passed = all_ok;
  item.detail = detail.str() + "tolerance " + fmt(cfg.check.brute_tol);
  return item;
}

std::pair<Vector, Vector> lemma_box(const RunConfig &cfg, const Problem &p,
                                    const SteadyPair &steady) {
  const int n = p.predictor.state_dim(), m = p.predictor.control_dim();
  if (cfg.lemma.lower.size() || cfg.lemma.upper.size()) {
    if (cfg.lemma.lower.size() != n + m || cfg.lemma.upper.size() != n + m)
      throw ConfigError("analysis.lemma box needs n+m entries");
    return {cfg.lemma.lower, cfg.lemma.upper};
  }
  Vector z(n + m);
  z << steady.x_s, steady.u_s;
  Vector lo = z.array() - cfg.lemma.half_width;
  Vector hi = z.array() + cfg.lemma.half_width;
  if (cfg.model_name == "cstr")
    lo.head(n) = lo.head(n).cwiseMax(0.0);
  lo.tail(m) = lo.tail(m).cwiseMax(p.bounds.lower);
  hi.tail(m) = hi.tail(m).cwiseMin(p.bounds.upper);
  return {lo, hi};
}

CheckItem check_lemma_scan(const RunConfig &cfg, const Problem &p,
                           const SteadyPair &steady) {
  CheckItem item;
  item.name = "lemma-scan";
  LemmaOneOptions opts;
  std::tie(opts.lower, opts.upper) = lemma_box(cfg, p, steady);
  opts.n_samples = cfg.lemma.samples;
  opts.eps_levels = cfg.lemma.eps_levels;
  opts.min_scale = cfg.lemma.min_scale;
  opts.seed = cfg.seed;
  const LemmaOneReport rep =
      lemma_one_scan(p.predictor, p.objective, steady, cfg.lemma.alpha, opts);
  // The anchor alone makes every level non-empty; require sampled points.
  const int anchor = opts.include_anchor ? 1 : 0;
  bool populated = true;
  for (const auto &lv : rep.levels)
    populated = populated && lv.qualifiers > anchor;
  item.passed =
      populated && rep.nested && rep.monotone && rep.decreasing_trend;
  std::ostringstream os;
  os << "alpha " << fmt(cfg.lemma.alpha) << ", Lipschitz estimate "
     << fmt(rep.lipschitz_estimate) << ", nested "
     << (rep.nested ? "yes" : "no") << ", monotone "
     << (rep.monotone ? "yes" : "no") << ", distance shrinks "
     << (rep.decreasing_trend ? "yes" : "no") << ", sampled qualifiers at "
     << "every level " << (populated ? "yes" : "no") << "; ";
  for (const auto &lv : rep.levels) {
    os << "eps " << fmt(lv.eps) << ": " << lv.qualifiers << " qualify, max "
       << "Delta " << fmt(lv.max_delta) << ", max dist " << fmt(lv.max_dist)
       << "; ";
    item.data["levels"].push_back({{"eps", lv.eps},
                                   {"qualifiers", lv.qualifiers},
                                   {"max_delta", lv.max_delta},
                                   {"max_dist", lv.max_dist},
                                   {"min_ell", lv.min_ell},
                                   {"max_ell", lv.max_ell}});
  }
  item.detail = os.str();
  item.data["nested"] = rep.nested;
  item.data["monotone"] = rep.monotone;
  item.data["decreasing_trend"] = rep.decreasing_trend;
  item.data["populated"] = populated;
  item.data["lipschitz_estimate"] = rep.lipschitz_estimate;
  item.data["alpha"] = cfg.lemma.alpha;
  item.data["samples"] = rep.samples.size();
  item.data["box_lower"] = vec(opts.lower);
  item.data["box_upper"] = vec(opts.upper);
  return item;
}

CommandResult cmd_check(const RunConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg);
  std::vector<CheckItem> items;
  items.push_back(check_gradients(cfg, p));
  items.push_back(check_shift_invariance(cfg, p));
  items.push_back(check_brute_force(cfg, p));
  if (cfg.check.lemma) {
    try {
      items.push_back(check_lemma_scan(cfg, p, steady_pair(cfg, p)));
    } catch (const SteadyStateError &e) {
      items.push_back({"lemma-scan", false,
                       std::string("no steady pair: ") + e.what(), {}});
    }
  }
  CommandResult r;
  std::ostringstream os;
  bool all = true;
  for (const auto &it : items) {
    all = all && it.passed;
    os << (it.passed ? "PASS " : "FAIL ") << it.name << ": " << it.detail
       << "\n";
    r.report["checks"].push_back({{"name", it.name},
                                  {"passed", it.passed},
                                  {"detail", it.detail},
                                  {"data", it.data}});
  }
  r.report["passed"] = all;
  ensure_directory(cfg.output_dir);
  json doc = run_metadata(cfg.document, "check", seconds_since(t0));
  doc["report"] = r.report;
  const std::string path = join(cfg.output_dir, "check.json");
  write_json(path, doc);
  r.outputs.push_back(path);
  r.summary = os.str();
  r.exit_code = all ? kExitOk : kExitCheckFailed;
  return r;
}

CommandResult cmd_plot_export(const RunConfig &cfg,
                              const std::vector<std::string> &inputs) {
  std::vector<std::string> files = inputs;
  if (files.empty() && fs::is_directory(cfg.output_dir))
    for (const auto &e : fs::recursive_directory_iterator(cfg.output_dir)) {
      const std::string name = e.path().filename().string();
      if (e.is_regular_file() &&
          (name == "closedloop.csv" || name == "terminal_bound.csv"))
        files.push_back(e.path().string());
    }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw ConfigError("plot-export: no closedloop.csv or terminal_bound.csv "
                      "found under '" + cfg.output_dir + "'");

  const std::string plots = join(cfg.output_dir, "plots");
  ensure_directory(plots);
  auto stem = [](const std::string &path) {
    const fs::path p(path);
    const std::string parent = p.parent_path().filename().string();
    return (parent.empty() ? std::string("run") : parent) + "_" +
           p.stem().string();
  };
  std::vector<json> specs;
  std::vector<std::string> runs;
  for (const auto &f : files) {
    const CsvTable t = read_csv(f);
    if (fs::path(f).filename() == "terminal_bound.csv") {
      for (const char *col : {"gamma", "delta_N_star", "ell_N_abs"})
        if (t.column(col) < 0)
          throw ConfigError("plot-export: " + f + " lacks column '" + col +
                            "'");
      specs.push_back({{"kind", "bound-scaling"},
                       {"inputs", {f}},
                       {"tail_fraction", cfg.quasi.tail_fraction},
                       {"output", join(plots, stem(f) + "_bound_scaling.svg")}});
      continue;
    }
    try {
      validate_closed_loop_table(t);
    } catch (const ConfigError &e) {
      throw ConfigError("plot-export: " + f + ": " + e.what());
    }
    runs.push_back(f);
    for (const char *kind : {"trajectory", "tail"})
      specs.push_back({{"kind", kind},
                       {"inputs", {f}},
                       {"tail_fraction", cfg.quasi.tail_fraction},
                       {"output", join(plots, stem(f) + "_" + kind + ".svg")}});
  }
  if (runs.size() > 1)
    specs.push_back({{"kind", "overlay"},
                     {"inputs", runs},
                     {"tail_fraction", cfg.quasi.tail_fraction},
                     {"output", join(plots, "overlay.svg")}});

  CommandResult r;
  const std::string index = join(plots, "specs.json");
  write_json(index, json{{"version", kVersion}, {"specs", specs}});
  r.outputs.push_back(index);
  r.report["specs"] = specs;
  std::ostringstream os;
  os << specs.size() << " plot specs from " << files.size() << " files -> "
     << index << "\n";
  for (const auto &s : specs)
    os << "  " << s["kind"].get<std::string>() << " -> "
       << s["output"].get<std::string>() << "\n";
  r.summary = os.str();
  return r;
}

CommandResult run_command(const RunConfig &cfg, const std::string &command,
                          const std::vector<std::string> &inputs) {
  if (command == "steady")
    return cmd_steady(cfg);
  if (command == "openloop")
    return cmd_openloop(cfg);
  if (command == "closedloop")
    return cmd_closedloop(cfg);
  if (command == "sweep")
    return cmd_sweep(cfg);
  if (command == "check")
    return cmd_check(cfg);
  if (command == "plot-export")
    return cmd_plot_export(cfg, inputs);
  throw ConfigError("unknown command '" + command + "'");
}

CommandResult run_command_safely(const RunConfig &cfg,
                                 const std::string &command,
                                 const std::vector<std::string> &inputs) {
  CommandResult r;
  try {
    return run_command(cfg, command, inputs);
  } catch (const ConfigError &e) {
    r.exit_code = kExitConfig;
    r.summary = std::string("config error: ") + e.what() + "\n";
  } catch (const std::exception &e) {
    r.exit_code = kExitRuntime;
    r.summary = std::string("error: ") + e.what() + "\n";
  }
  return r;
}

} // namespace empc
