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
#ifndef EMPC_CONFIG_HPP
#define EMPC_CONFIG_HPP

#include "analysis.hpp"
#include "controller.hpp"
#include "models.hpp"
#include "objective.hpp"
#include "steady.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace empc {

struct LemmaScanConfig {
  double alpha = 2.0;
  int samples = 10000;
  std::vector<double> eps_levels{1e-2, 1e-3, 1e-4};
  // Box around z_s with this half-width, clipped at zero for the CSTR
  // states; replaced by lower/upper when both are given.
  double half_width = 0.05;
  double min_scale = 1e-3;
  Vector lower;
  Vector upper;
};

struct CheckConfig {
  int gradient_probes = 100;
  double gradient_tol = 1e-5;
  // Step of the central differences compared against the adjoint.
  double fd_step = 1e-6;
  int brute_horizon = 2;
  int brute_grid = 21;
  int brute_refinements = 10;
  double brute_tol = 1e-6;
  double shift = 10.0;
  double shift_tol = 1e-6;
  bool lemma = true;
};

struct SweepConfig {
  std::string mode = "closedloop"; // or "terminal-bound"
  std::vector<double> alphas;
  std::vector<double> gammas;
  // Explicit (alpha, gamma) pairs; replace the alphas x gammas product.
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> tau_plants;
  int workers = 1;
};

/// Fully resolved run configuration. `document` keeps the merged JSON that
/// produced it, for echoing into metadata.
struct RunConfig {
  nlohmann::json document;

  std::string model_name = "cstr";
  ModelParams model_params;

  std::string stage_cost = "neg_x2";
  StageCostParams stage_params;
  std::optional<SoftConstraints> soft;
  double ell_shift = 0.0;
  std::optional<ControlBounds> bounds;

  EMPCConfig controller;
  double pred_max_substep = 0.005;
  double plant_max_substep = 0.001;

  SteadyOptions steady;
  QuasiSteadyOptions quasi;
  LemmaScanConfig lemma;
  CheckConfig check;
  SweepConfig sweep;

  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

/// The default document; every accepted key appears in it.
nlohmann::json default_config_document();

/// Merges `doc` over the defaults, rejects unknown keys and resolves.
RunConfig parse_config(const nlohmann::json &doc);
RunConfig load_config(const std::string &path);

/// Applies "section.key=value"; the value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(nlohmann::json &doc, const std::string &assignment);

/// Model, dynamics, objective and box built from a configuration.
struct Problem {
  std::shared_ptr<const OdeModel> model;
  DiscreteDynamics predictor;
  DiscreteDynamics plant;
  EconomicObjective objective;
  ControlBounds bounds;
};

Problem build_problem(const RunConfig &cfg);

} // namespace empc

#endif // EMPC_CONFIG_HPP
