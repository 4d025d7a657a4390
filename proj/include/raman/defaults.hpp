#pragma once

#include "raman/propagate.hpp"
#include "raman/types.hpp"

namespace raman {

// Canonical bench setup. The pump comb is spread so the four triangular gain
// lobes tile the signal band: p4 peaks at the low band edge, p3 mid-band,
// p1/p2 just above the top edge. Peak efficiency is the calibrated value
// that puts the maximum on-off gain at experimental-maximum pump powers at
// 4.9 dB (see calibrate_peak_efficiency and the README).
inline constexpr std::array<double, kNumPumps> kDefaultPumpFreqsThz{
    210.6, 209.4, 206.6, 205.0};
inline constexpr std::array<double, kNumPumps> kExperimentalPumpMaxDbm{
    20.0, 20.0, 20.0, 19.94};
inline constexpr double kSimPumpCapDbm = 23.0;
inline constexpr double kCalibratedPeakEfficiency = 0.2525315317;  // 1/(W km)
inline constexpr double kMaxOnOffGainDb = 4.9;

inline FiberParams default_fiber() {
  FiberParams f;
  f.length_km = 50.0;
  f.alpha_signal_db_km = 0.2;
  f.alpha_pump_db_km = 0.25;
  f.raman_peak_efficiency = kCalibratedPeakEfficiency;
  f.raman_peak_shift_thz = 13.2;
  f.launch_power_dbm = -16.0;
  return f;
}

inline PumpConfig default_pumps(const PumpVector& powers_dbm) {
  PumpConfig p;
  p.freqs_thz = kDefaultPumpFreqsThz;
  p.powers_dbm = powers_dbm;
  return p;
}

inline PumpBounds experimental_bounds() {
  PumpBounds b;
  b.lower.fill(kPumpMinDbm);
  b.upper = kExperimentalPumpMaxDbm;
  return b;
}

inline PumpBounds simulation_bounds(double cap_dbm = kSimPumpCapDbm) {
  PumpBounds b;
  b.lower.fill(kPumpMinDbm);
  b.upper.fill(cap_dbm);
  return b;
}

}  // namespace raman
