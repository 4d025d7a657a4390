#pragma once

#include <vector>

#include "raman/types.hpp"

namespace raman {

struct PropagationOptions {
  double step_km = 0.1;   // signal-pass RK4 step; pump pass runs at step/2
  bool parallel = true;   // OpenMP over channels; false = serial reference
};

// Steady-state co-propagating Raman system: every wave travels in +x,
// launch powers are given at x = 0 in mW. alpha may be zero (lossless test
// configurations). Returns powers in mW at all n_steps+1 uniform nodes,
// row-major [wave][node]. Fixed-step RK4.
Matrix integrate_copropagating(const std::vector<double>& freqs_thz,
                               const std::vector<double>& alpha_db_km,
                               const std::vector<double>& launch_mw,
                               double peak_efficiency, double peak_shift_thz,
                               double length_km, int n_steps);

// Signal powers of all 44 channels on an arbitrary uniform z grid with
// n_nodes nodes spanning [0, L]; node spacing doubles as the RK4 step.
// Used by the OTDR emulation path, which needs ~8 m resolution.
struct FineProfile {
  double dz_km = 0.0;
  Matrix signal_dbm;  // kNumChannels x n_nodes, node i at z = i*dz
};

FineProfile propagate_fine(const PumpConfig& pumps, const FiberParams& fiber,
                           const FrequencyGrid& fgrid, int n_nodes,
                           bool parallel = true);

// Counter-pumped span solve on the canonical 44 x 100 grid. Two passes:
// the four-pump system integrated from its z = L launch (pumps interact
// only with each other), then each signal channel forward through the
// frozen pump field. Signal depletion of the pumps and signal-signal
// Raman scattering are neglected.
PowerProfile2D propagate(const PumpConfig& pumps, const FiberParams& fiber,
                         const FrequencyGrid& fgrid, const DistanceGrid& dgrid,
                         const PropagationOptions& opts = {});

// g(f) = P(f, L | on) - P(f, L | off), dB. Both profiles must share grids;
// `off` is the all-pumps-at-0-mW reference.
GainSpectrum on_off_gain(const PowerProfile2D& on, const PowerProfile2D& off);

// One-time setup calibration: scales the triangular curve's peak efficiency
// until the maximum on-off gain at the given pump powers hits target_gain_db.
double calibrate_peak_efficiency(const FiberParams& fiber,
                                 const PumpConfig& pumps_at_max,
                                 const FrequencyGrid& fgrid,
                                 const DistanceGrid& dgrid,
                                 double target_gain_db,
                                 const PropagationOptions& opts = {});

}  // namespace raman
