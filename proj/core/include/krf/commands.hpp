#pragma once

#include <cstdint>
#include <string>

#include "krf/config.hpp"
#include "krf/verify.hpp"

namespace krf {

struct CommandOptions {
  std::string out_dir_override;
  bool has_seed = false;
  std::uint64_t seed_override = 0;
  int threads = 1;
  bool strict = false;
};

/// Integrate the configured flows and write checkpoints plus diagnostics.
int cmd_run(const ScenarioConfig& cfg, const CommandOptions& opt);

/// Distance fields at a ladder time ("0.25") or for the limit current
/// ("limit"); both solver methods are emitted.
int cmd_dist(const ScenarioConfig& cfg, const CommandOptions& opt,
             const std::string& time_or_limit);

/// Run the named check battery; report.csv plus a human-readable summary.
/// Exit status is nonzero iff a non-optional check fails.
int cmd_verify(const ScenarioConfig& cfg, const CommandOptions& opt);

/// The weak-vs-metric convergence probe at one net level.
int cmd_counterexample(int level, const CommandOptions& opt);

/// Render checkpoints in the output directory to graymaps + CSV and print
/// the report summary.
int cmd_report(const ScenarioConfig& cfg, const CommandOptions& opt);

/// The full check battery for one scenario config (shared by cmd_verify and
/// the acceptance suite).
EstimateReport run_check_battery(const ScenarioConfig& cfg, int threads, bool strict);

}  // namespace krf
