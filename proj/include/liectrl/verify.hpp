#pragma once

#include <string>
#include <vector>

#include "liectrl/config.hpp"

namespace liectrl {

struct VerifyRow {
  std::string suite;
  std::string check;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

/// Runs every module's invariant suite against the configured system.
/// Deterministic for a fixed config and seed.
std::vector<VerifyRow> run_verification(const ExperimentConfig& cfg);

}  // namespace liectrl
