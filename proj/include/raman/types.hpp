#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raman/grids.hpp"
#include "raman/matrix.hpp"
#include "raman/units.hpp"

namespace raman {

inline constexpr int kNumPumps = 4;
inline constexpr double kPumpBandLowThz = 203.9;
inline constexpr double kPumpBandHighThz = 211.1;
inline constexpr double kPumpMinDbm = -5.0;  // lowest controllable setting

using PumpVector = std::array<double, kNumPumps>;  // powers, dBm

// Four counter-propagating pumps launched at z = L. Frequencies are fixed
// per setup; powers are the optimization variables. OFF (0 mW, -inf dBm)
// is distinct from the -5 dBm controllable minimum.
struct PumpConfig {
  std::array<double, kNumPumps> freqs_thz{};
  PumpVector powers_dbm{};

  void validate(const PumpVector& max_dbm) const {
    for (int j = 0; j < kNumPumps; ++j) {
      if (freqs_thz[j] < kPumpBandLowThz - 1e-9 ||
          freqs_thz[j] > kPumpBandHighThz + 1e-9)
        throw std::invalid_argument("PumpConfig: pump " + std::to_string(j + 1) +
                                    " frequency outside [203.9, 211.1] THz");
      if (j > 0 && !(freqs_thz[j] < freqs_thz[j - 1]))
        throw std::invalid_argument(
            "PumpConfig: frequencies must be strictly decreasing p1..p4");
      const double p = powers_dbm[j];
      const bool off = std::isinf(p) && p < 0;
      if (!off && !(p >= kPumpMinDbm - 1e-9 && p <= max_dbm[j] + 1e-9))
        throw std::invalid_argument("PumpConfig: pump " + std::to_string(j + 1) +
                                    " power " + std::to_string(p) +
                                    " dBm outside [-5, max] and not OFF");
      if (std::isnan(p))
        throw std::invalid_argument("PumpConfig: pump power is NaN");
    }
  }

  PumpConfig with_powers(const PumpVector& p) const {
    PumpConfig c = *this;
    c.powers_dbm = p;
    return c;
  }

  PumpConfig off() const {
    PumpConfig c = *this;
    c.powers_dbm.fill(kOffDbm);
    return c;
  }

  bool all_off() const {
    for (double p : powers_dbm)
      if (!(std::isinf(p) && p < 0)) return false;
    return true;
  }
};

struct FiberParams {
  double length_km = 50.0;
  double alpha_signal_db_km = 0.2;
  double alpha_pump_db_km = 0.25;
  double raman_peak_efficiency = 0.39;  // 1/(W km), calibration knob
  double raman_peak_shift_thz = 13.2;
  double launch_power_dbm = -16.0;  // per channel at z = 0

  void validate() const {
    if (!(length_km > 0)) throw std::invalid_argument("FiberParams: length must be > 0");
    if (!(alpha_signal_db_km > 0) || !(alpha_pump_db_km > 0))
      throw std::invalid_argument("FiberParams: attenuations must be > 0");
    if (!(raman_peak_efficiency > 0))
      throw std::invalid_argument("FiberParams: peak efficiency must be > 0");
    if (!(raman_peak_shift_thz > 0))
      throw std::invalid_argument("FiberParams: peak shift must be > 0");
    if (!std::isfinite(launch_power_dbm))
      throw std::invalid_argument("FiberParams: launch power must be finite");
  }
};

// Signal power in dBm over 44 channels x 100 distance points.
struct PowerProfile2D {
  Matrix values;  // rows = channels, cols = distance points, dBm
  FrequencyGrid fgrid;
  DistanceGrid dgrid;

  PowerProfile2D() : values(kNumChannels, kNumDistancePoints), fgrid(), dgrid() {}
  PowerProfile2D(FrequencyGrid f, DistanceGrid d)
      : values(kNumChannels, kNumDistancePoints), fgrid(f), dgrid(d) {}

  double at(int channel, int k) const { return values.at(channel, k); }
  double& at(int channel, int k) { return values.at(channel, k); }

  bool same_grids(const PowerProfile2D& o) const {
    return fgrid == o.fgrid && dgrid == o.dgrid;
  }

  void require_same_grids(const PowerProfile2D& o, const char* what) const {
    if (!same_grids(o))
      throw std::invalid_argument(std::string(what) + ": profile grids differ");
  }
};

// Per-channel on-off gain at z = L, dB.
struct GainSpectrum {
  std::array<double, kNumChannels> values_db{};
};

// Component-wise pump power box, dBm.
struct PumpBounds {
  PumpVector lower{};
  PumpVector upper{};

  void validate() const {
    for (int j = 0; j < kNumPumps; ++j) {
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
        throw std::invalid_argument("PumpBounds: bounds must be finite");
      if (!(lower[j] <= upper[j]))
        throw std::invalid_argument("PumpBounds: lower > upper for pump " +
                                    std::to_string(j + 1));
    }
  }

  bool contains(const PumpVector& p, double tol = 1e-9) const {
    for (int j = 0; j < kNumPumps; ++j)
      if (p[j] < lower[j] - tol || p[j] > upper[j] + tol) return false;
    return true;
  }
};

}  // namespace raman
