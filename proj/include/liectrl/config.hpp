#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "liectrl/entropy.hpp"

#include <json.hpp>

namespace liectrl {

struct NumericsConfig {
  double step = 1e-3;
  int thinning = 10;
  double tol_zero = 1e-10;
  double blowup_norm = 1e6;
  int candidate_cap = 5000;
  std::uint64_t seed = 0;
  int threads = 0;
  double chart_radius = 50.0;
  double oracle_fd_step = 1e-4;
  double volume_fd_step = 1e-5;
};

struct ControlsConfig {
  std::vector<Vec> dirs;
  Vec range_lo, range_hi;
  double dt = 0.25;
  int levels = 5;
  int random_count = 1500;
  bool anchors = true;
  int anchor_stride = 1;
};

/// One experiment: algebra, drift, controls, admissible pair and numerics.
/// Parses losslessly; defaults are filled so that the effective config can be
/// dumped and re-parsed to an equal experiment.
struct ExperimentConfig {
  std::string algebra_name;  // catalog name; empty when the table is inline
  std::shared_ptr<const LieAlgebra> table;
  AffineField drift;
  ControlsConfig controls;
  AdmissiblePair pair;
  NumericsConfig numerics;

  AffineSystem system() const;
  CandidateOptions candidate_options() const;
  NumericsOptions numerics_options() const;
  FlowOptions flow_options() const;
  nlohmann::json to_json() const;
};

/// Parses and validates a config file, reporting every validation problem at
/// once (not just the first).
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");
ExperimentConfig parse_config_json(const nlohmann::json& j, const std::string& origin = "<json>");

}  // namespace liectrl
