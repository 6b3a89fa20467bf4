#pragma once

#include <string>
#include <vector>

#include "krf/distance.hpp"
#include "krf/flow.hpp"
#include "krf/verify.hpp"

namespace krf {

/// KRF1 checkpoint: ASCII header "KRF1 <kind> <n> <t>" then n^2 little-endian
/// 8-byte floats, row-major, x fastest.
void write_checkpoint(const std::string& path, const std::string& kind, double t,
                      const ScalarField& field);

struct Checkpoint {
  std::string kind;
  double t = 0.0;
  ScalarField field;
};
Checkpoint read_checkpoint(const std::string& path);

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows,
                           const std::string& config_hash);

struct DistanceRecord {
  Vec2 source, target;
  double value = 0.0;
  std::string method;
  std::string metric_tag;
  double t_or_limit = -1.0;  // -1 encodes the limit current
};
void write_distances_csv(const std::string& path,
                         const std::vector<DistanceRecord>& records,
                         const std::string& config_hash);

struct HolderRecord {
  double exponent, constant, residual;
  std::string direction;
};
void write_holder_csv(const std::string& path, const std::vector<HolderRecord>& fits,
                      const std::string& config_hash);

void write_report_csv(const std::string& path, const EstimateReport& report,
                      const std::string& config_hash);

/// Plain (ASCII, P2) graymap of a field, linearly mapped to 0..65535,
/// plus a CSV twin with the raw values.
void write_pgm(const std::string& path, const ScalarField& field);
void write_field_csv(const std::string& path, const ScalarField& field,
                     const std::string& config_hash);

/// Output-directory provenance: create (or check) <dir>/manifest.txt. A
/// directory stamped with a different config hash is refused.
void claim_output_dir(const std::string& dir, const std::string& config_hash);
void record_artifact(const std::string& dir, const std::string& filename);

}  // namespace krf
