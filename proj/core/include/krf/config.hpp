#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krf/potential.hpp"
#include "krf/torus.hpp"

namespace krf {

/// One experiment scenario: grid, singular data, flow ladder, check subset,
/// sampling, and output location. Parsed from the flat sectioned key/value
/// format (see the repository README for the grammar).
struct ScenarioConfig {
  int grid_n = 512;
  std::vector<PoleSpec> poles;

  double t_end = 1.0;
  int ladder_depth = 10;
  std::vector<int> levels = {4, 6, 8};

  std::vector<std::string> checks = {"all"};

  std::uint64_t seed = 42;
  int n_sources = 10;
  int n_targets = 5;

  std::string out_dir = "out";

  /// Canonical text form; parse(serialize(x)) reproduces x exactly.
  std::string serialize() const;

  /// FNV-1a hash of the canonical form, hex-encoded.
  std::string hash() const;

  /// Re-validate module preconditions (grid size, cusp guard, separation,
  /// ladder sanity). Throws with a named reason.
  void validate() const;
};

/// Parse a config text. Errors carry 1-based line numbers:
/// "<name>:<line>: <message>".
ScenarioConfig parse_config(const std::string& text, const std::string& name);

/// Load and parse a config file.
ScenarioConfig load_config(const std::string& path);

}  // namespace krf
