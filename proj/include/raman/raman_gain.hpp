#pragma once

#include "raman/types.hpp"

namespace raman {

// Upper knot of the triangular gain-efficiency approximation.
inline constexpr double kRamanCutoffThz = 15.0;

// Triangular approximation of the silica Raman gain efficiency curve:
// zero at or below zero shift, linear rise to the peak at the Stokes shift
// (13.2 THz), linear fall back to zero at 15 THz, zero beyond.
inline double raman_gain_efficiency(double delta_f_thz, double peak_efficiency,
                                    double peak_shift_thz) {
  if (delta_f_thz <= 0.0) return 0.0;
  if (delta_f_thz <= peak_shift_thz)
    return peak_efficiency * delta_f_thz / peak_shift_thz;
  if (delta_f_thz < kRamanCutoffThz)
    return peak_efficiency * (kRamanCutoffThz - delta_f_thz) /
           (kRamanCutoffThz - peak_shift_thz);
  return 0.0;
}

inline double raman_gain_efficiency(double delta_f_thz,
                                    const FiberParams& fiber) {
  return raman_gain_efficiency(delta_f_thz, fiber.raman_peak_efficiency,
                               fiber.raman_peak_shift_thz);
}

}  // namespace raman
