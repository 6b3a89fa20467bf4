#pragma once

#include <cstdint>

#include "krf/torus.hpp"

namespace krf {

/// Tuned construction parameters for the weak-vs-metric convergence probe at
/// one net level. The net is a union of full closed geodesics in four
/// directions (axis pair at s_axis spacing, diagonal pair at s_diag); the
/// tube carved around it has the given absolute full width.
struct CounterexampleParams {
  int level = 2;
  int n = 512;        // working resolution
  double s_axis = 0.25;
  double s_diag = 0.25;
  double width = 2.0 / 512.0;
};

/// Per-level tuned table (levels 2..7).
CounterexampleParams counterexample_params(int level);

struct CounterexampleDensity {
  ScalarField psi;          // -ln 4 on the tube, small positive elsewhere
  double tube_fraction = 0.0;
  double l1_deviation = 0.0;  // int |e^psi - 1|
  double snap_radius = 0.0;   // covering radius of the carved net
};

/// Build the level-j density on the given grid. The tube is flat-bottomed
/// at -ln 4 and the complement is raised uniformly so the discrete mass is
/// exactly 1. Rejects grids whose spacing cannot carve the tube.
CounterexampleDensity counterexample_density(int level, TorusGrid grid);
CounterexampleDensity counterexample_density(const CounterexampleParams& p,
                                             TorusGrid grid);

struct CounterexampleReport {
  int level = 0;
  int n = 0;
  double l1_deviation = 0.0;
  double l1_bound = 0.0;       // 1.1 * 2^-j
  bool pass_weak = false;      // (i)
  double sup_dev_half = 0.0;   // sup |d_j - d_S/2| over the pair battery
  double sup_bound = 0.0;      // 5 * 2^-j + 2h
  bool pass_metric = false;    // (ii)
  double min_gap_to_flat = 0.0;   // min |d_j - d_S| over diameter-order pairs
  double gap_bound = 0.0;         // 0.4 * max d_S / 2
  bool pass_gap = false;       // (iii)
  bool lower_half_ok = false;  // d_j >= d_S/2 pointwise on the battery
};

/// Full level run: build the density, solve distances, verify the three
/// bounds (weak convergence of the densities, uniform convergence of the
/// distances to half the flat distance, uniform separation from the flat
/// distance itself).
CounterexampleReport counterexample_run(int level, std::uint64_t seed);

}  // namespace krf
