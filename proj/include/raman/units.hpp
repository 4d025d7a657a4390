#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raman {

// Power unit convention: configuration and profiles live in dBm, the
// integrator works in linear units. A pump that is switched OFF carries
// 0 mW, represented as -inf dBm; dbm_to_mw maps that to exactly 0.

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) {
  if (!(mw > 0.0))
    throw std::domain_error("mw_to_dbm: power must be > 0 mW, got " +
                            std::to_string(mw));
  return 10.0 * std::log10(mw);
}

inline double dbm_to_w(double dbm) { return dbm_to_mw(dbm) * 1e-3; }
inline double w_to_dbm(double w) { return mw_to_dbm(w * 1e3); }

// dB/km -> 1/km (natural log scale) for use inside the coupled ODEs.
inline double db_per_km_to_linear(double db_per_km) {
  return db_per_km * std::numbers::ln10 / 10.0;
}

inline constexpr double kOffDbm = -std::numeric_limits<double>::infinity();

}  // namespace raman
