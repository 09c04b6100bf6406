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
#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace empc {

using nlohmann::json;

json default_config_document() {
  return json::parse(R"({
  "model": {"name": "cstr", "params": {}},
  "objective": {
    "stage_cost": null,
    "params": {},
    "alpha": 0.01,
    "gamma": 0.001,
    "ell_shift": 0.0,
    "soft_constraints": null
  },
  "bounds": null,
  "controller": {
    "horizon": 20,
    "tau_pred": 0.1,
    "tau_plant": 0.1,
    "steps": 300,
    "duration": null,
    "x0": null,
    "cold_start": null,
    "pred_max_substep": 0.005,
    "plant_max_substep": 0.001
  },
  "solver": {
    "method": "projected-newton",
    "gradient": "adjoint",
    "max_iters": 1000,
    "grad_tol": 1e-8,
    "step_tol": 1e-12,
    "fd_step": 1e-6,
    "memory": 10,
    "hessian_refresh": 10,
    "armijo": 1e-4
  },
  "steady": {
    "grid_points": 401,
    "u_tol": 1e-10,
    "initial_guess": null,
    "max_newton_iters": 100,
    "newton_tol": 1e-12
  },
  "analysis": {
    "tail_fraction": 0.25,
    "min_tail": 20,
    "eps_ell": 1e-3,
    "eps_delta": 1e-3,
    "lemma": {
      "alpha": 2.0,
      "samples": 10000,
      "eps_levels": [1e-2, 1e-3, 1e-4],
      "half_width": 0.05,
      "min_scale": 1e-3,
      "lower": null,
      "upper": null
    }
  },
  "check": {
    "gradient_probes": 100,
    "gradient_tol": 1e-5,
    "fd_step": 1e-6,
    "brute_horizon": 2,
    "brute_grid": 21,
    "brute_refinements": 10,
    "brute_tol": 1e-6,
    "shift": 10.0,
    "shift_tol": 1e-6,
    "lemma": true
  },
  "sweep": {
    "mode": "closedloop",
    "alphas": [],
    "gammas": [],
    "pairs": [],
    "tau_plants": [],
    "workers": 1
  },
  "output": {"dir": "out"},
  "seed": 0
})");
}

namespace {

// Objects whose keys are free-form.
bool open_object(const std::string &path) {
  return path == "model.params" || path == "objective.params" ||
         path == "objective.soft_constraints" || path == "bounds";
}

void check_keys(const json &doc, const json &ref, const std::string &path) {
  if (!doc.is_object() || !ref.is_object())
    return;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string sub = path.empty() ? it.key() : path + "." + it.key();
    if (!ref.contains(it.key()))
      throw ConfigError("config: unknown key '" + sub + "'");
    if (!open_object(sub))
      check_keys(it.value(), ref[it.key()], sub);
  }
}

// Like a merge patch, except that null replaces instead of deleting.
void overlay(json &base, const json &top, const std::string &path) {
  for (auto it = top.begin(); it != top.end(); ++it) {
    const std::string sub = path.empty() ? it.key() : path + "." + it.key();
    json &slot = base[it.key()];
    if (it.value().is_object() && slot.is_object() && !open_object(sub))
      overlay(slot, it.value(), sub);
    else
      slot = it.value();
  }
}

template <typename T> T get(const json &j, const char *key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: bad value for '") + key +
                      "': " + e.what());
  }
}

Vector to_vector(const json &j, const std::string &what) {
  if (!j.is_array())
    throw ConfigError("config: '" + what + "' must be an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError("config: '" + what + "' must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::vector<double> to_list(const json &j, const std::string &what) {
  const Vector v = to_vector(j, what);
  return {v.data(), v.data() + v.size()};
}

} // namespace

RunConfig parse_config(const json &user) {
  if (!user.is_object())
    throw ConfigError("config: top level must be an object");
  const json defaults = default_config_document();
  check_keys(user, defaults, "");
  json doc = defaults;
  overlay(doc, user, "");

  RunConfig cfg;
  cfg.document = doc;

  const json &model = doc["model"];
  cfg.model_name = get<std::string>(model, "name");
  for (auto &[k, v] : model["params"].items()) {
    if (!v.is_number())
      throw ConfigError("config: model parameter '" + k + "' must be numeric");
    cfg.model_params[k] = v.get<double>();
  }
  const auto ode = make_model(cfg.model_name, cfg.model_params);
  const int n = ode->state_dim(), m = ode->control_dim();

  const json &obj = doc["objective"];
  if (obj["stage_cost"].is_null()) {
    if (cfg.model_name == "cstr") {
      cfg.stage_cost = "neg_x2";
    } else {
      cfg.stage_cost = "quadratic";
      cfg.stage_params["wx"] = std::vector<double>(n, 1.0);
      cfg.stage_params["x_ref"] = std::vector<double>(n, 0.3);
    }
  } else {
    cfg.stage_cost = get<std::string>(obj, "stage_cost");
  }
  for (auto &[k, v] : obj["params"].items())
    cfg.stage_params[k] = v.is_number() ? std::vector<double>{v.get<double>()}
                                        : to_list(v, "objective.params." + k);
  cfg.controller.alpha = get<double>(obj, "alpha");
  cfg.controller.gamma = get<double>(obj, "gamma");
  cfg.ell_shift = get<double>(obj, "ell_shift");
  if (!obj["soft_constraints"].is_null()) {
    const json &s = obj["soft_constraints"];
    for (auto &[k, _] : s.items())
      if (k != "a" && k != "b" && k != "rho")
        throw ConfigError("config: unknown key 'objective.soft_constraints." +
                          k + "'");
    SoftConstraints sc;
    const json &rows = s.at("a");
    if (!rows.is_array())
      throw ConfigError("config: soft_constraints.a must be a list of rows");
    sc.a = Matrix(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vector r = to_vector(rows[i], "objective.soft_constraints.a");
      if (r.size() != n)
        throw ConfigError("config: soft constraint rows need one entry per state");
      sc.a.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    sc.b = to_vector(s.at("b"), "objective.soft_constraints.b");
    sc.rho = get<double>(s, "rho");
    cfg.soft = sc;
  }

  if (!doc["bounds"].is_null()) {
    const json &b = doc["bounds"];
    for (auto &[k, _] : b.items())
      if (k != "lower" && k != "upper")
        throw ConfigError("config: unknown key 'bounds." + k + "'");
    cfg.bounds = ControlBounds(to_vector(b.at("lower"), "bounds.lower"),
                               to_vector(b.at("upper"), "bounds.upper"));
    if (cfg.bounds->dim() != m)
      throw ConfigError("config: bounds need one entry per control");
  }

  const json &ctl = doc["controller"];
  EMPCConfig &c = cfg.controller;
  c.horizon = get<int>(ctl, "horizon");
  c.tau_pred = get<double>(ctl, "tau_pred");
  c.tau_plant = get<double>(ctl, "tau_plant");
  c.steps = get<int>(ctl, "steps");
  if (!ctl["duration"].is_null()) {
    // Simulated time wins over the step count, so runs at different plant
    // periods cover the same horizon.
    const double duration = get<double>(ctl, "duration");
    if (!(duration > 0) || !(c.tau_plant > 0))
      throw ConfigError("config: controller.duration must be positive");
    c.steps = static_cast<int>(std::llround(duration / c.tau_plant));
  }
  if (ctl["x0"].is_null()) {
    c.x0 = Vector::Zero(n);
    if (cfg.model_name == "cstr")
      c.x0 << 0.5, 0.1, 0.2;
  } else {
    c.x0 = to_vector(ctl["x0"], "controller.x0");
  }
  if (!ctl["cold_start"].is_null())
    c.cold_start = to_vector(ctl["cold_start"], "controller.cold_start");
  cfg.pred_max_substep = get<double>(ctl, "pred_max_substep");
  cfg.plant_max_substep = get<double>(ctl, "plant_max_substep");
  if (!(cfg.pred_max_substep > 0) || !(cfg.plant_max_substep > 0))
    throw ConfigError("config: max substeps must be positive");

  const json &sol = doc["solver"];
  SolverSettings &s = c.solver;
  s.method = parse_solver_method(get<std::string>(sol, "method"));
  s.gradient_mode = parse_gradient_mode(get<std::string>(sol, "gradient"));
  s.max_iters = get<int>(sol, "max_iters");
  s.grad_tol = get<double>(sol, "grad_tol");
  s.step_tol = get<double>(sol, "step_tol");
  s.fd_step = get<double>(sol, "fd_step");
  s.memory = get<int>(sol, "memory");
  s.hessian_refresh = get<int>(sol, "hessian_refresh");
  s.armijo = get<double>(sol, "armijo");
  s.validate();

  const json &st = doc["steady"];
  cfg.steady.grid_points = get<int>(st, "grid_points");
  cfg.steady.u_tol = get<double>(st, "u_tol");
  if (!st["initial_guess"].is_null())
    cfg.steady.initial_guess = to_vector(st["initial_guess"], "steady.initial_guess");
  cfg.steady.max_newton_iters = get<int>(st, "max_newton_iters");
  cfg.steady.newton_tol = get<double>(st, "newton_tol");

  const json &an = doc["analysis"];
  cfg.quasi.tail_fraction = get<double>(an, "tail_fraction");
  cfg.quasi.min_tail = get<int>(an, "min_tail");
  cfg.quasi.eps_ell_threshold = get<double>(an, "eps_ell");
  cfg.quasi.eps_delta_threshold = get<double>(an, "eps_delta");
  cfg.quasi.ell_shift = cfg.ell_shift;
  cfg.quasi.alpha = c.alpha;
  const json &lm = an["lemma"];
  cfg.lemma.alpha = get<double>(lm, "alpha");
  cfg.lemma.samples = get<int>(lm, "samples");
  cfg.lemma.eps_levels = to_list(lm["eps_levels"], "analysis.lemma.eps_levels");
  cfg.lemma.half_width = get<double>(lm, "half_width");
  cfg.lemma.min_scale = get<double>(lm, "min_scale");
  if (!lm["lower"].is_null() || !lm["upper"].is_null()) {
    cfg.lemma.lower = to_vector(lm["lower"], "analysis.lemma.lower");
    cfg.lemma.upper = to_vector(lm["upper"], "analysis.lemma.upper");
  }

  const json &ck = doc["check"];
  cfg.check.gradient_probes = get<int>(ck, "gradient_probes");
  cfg.check.gradient_tol = get<double>(ck, "gradient_tol");
  cfg.check.fd_step = get<double>(ck, "fd_step");
  cfg.check.brute_horizon = get<int>(ck, "brute_horizon");
  cfg.check.brute_grid = get<int>(ck, "brute_grid");
  cfg.check.brute_refinements = get<int>(ck, "brute_refinements");
  cfg.check.brute_tol = get<double>(ck, "brute_tol");
  cfg.check.shift = get<double>(ck, "shift");
  cfg.check.shift_tol = get<double>(ck, "shift_tol");
  cfg.check.lemma = get<bool>(ck, "lemma");
  if (cfg.check.brute_horizon < 1 || cfg.check.brute_horizon > 3)
    throw ConfigError("config: check.brute_horizon must lie in [1, 3]");
  if (cfg.check.brute_grid < 3)
    throw ConfigError("config: check.brute_grid must be >= 3");

  const json &sw = doc["sweep"];
  cfg.sweep.mode = get<std::string>(sw, "mode");
  if (cfg.sweep.mode != "closedloop" && cfg.sweep.mode != "terminal-bound")
    throw ConfigError("config: sweep.mode must be 'closedloop' or "
                      "'terminal-bound'");
  cfg.sweep.alphas = to_list(sw["alphas"], "sweep.alphas");
  cfg.sweep.gammas = to_list(sw["gammas"], "sweep.gammas");
  cfg.sweep.tau_plants = to_list(sw["tau_plants"], "sweep.tau_plants");
  if (!sw["pairs"].is_array())
    throw ConfigError("config: sweep.pairs must be a list of [alpha, gamma]");
  for (const json &pr : sw["pairs"]) {
    const Vector v = to_vector(pr, "sweep.pairs");
    if (v.size() != 2)
      throw ConfigError("config: sweep.pairs entries are [alpha, gamma]");
    cfg.sweep.pairs.emplace_back(v[0], v[1]);
  }
  cfg.sweep.workers = get<int>(sw, "workers");
  if (cfg.sweep.workers < 1)
    throw ConfigError("config: sweep.workers must be >= 1");

  cfg.output_dir = get<std::string>(doc["output"], "dir");
  cfg.seed = get<std::uint64_t>(doc, "seed");

  if (c.x0.size() != n)
    throw ConfigError("config: controller.x0 needs " + std::to_string(n) +
                      " entries");
  c.validate();
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error &e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(doc);
}

void apply_override(json &doc, const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error &) {
    value = text;
  }
  json *node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty())
      throw ConfigError("override '" + assignment + "' has an empty key");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    json &next = (*node)[path[i]];
    if (next.is_null())
      next = json::object();
    if (!next.is_object())
      throw ConfigError("override '" + assignment + "': '" + path[i] +
                        "' is not a section");
    node = &next;
  }
  (*node)[path.back()] = value;
}

Problem build_problem(const RunConfig &cfg) {
  auto model = make_model(cfg.model_name, cfg.model_params);
  const EMPCConfig &c = cfg.controller;
  DiscreteDynamics predictor(model, c.tau_pred,
                             substeps_for(c.tau_pred, cfg.pred_max_substep));
  DiscreteDynamics plant(model, c.tau_plant,
                         substeps_for(c.tau_plant, cfg.plant_max_substep));
  EconomicObjective objective(
      make_stage_cost(cfg.stage_cost, model->state_dim(), model->control_dim(),
                      cfg.stage_params),
      c.alpha, c.gamma, cfg.soft, cfg.ell_shift);
  ControlBounds bounds =
      cfg.bounds ? *cfg.bounds
                 : default_bounds(cfg.model_name, model->control_dim());
  return {std::move(model), std::move(predictor), std::move(plant),
          std::move(objective), std::move(bounds)};
}

} // namespace empc
