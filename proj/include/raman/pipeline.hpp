#pragma once

#include <cstdint>
#include <vector>

#include "raman/propagate.hpp"
#include "raman/setup.hpp"
#include "raman/types.hpp"

namespace raman {

// Nominal OTDR distance resolution. Traces tile [0, L] inclusive with the
// uniform spacing closest to the nominal value (50 km -> 6099 samples at
// 8.1994 m).
inline constexpr double kOtdrResolutionM = 8.2;

inline int otdr_trace_samples(double span_km) {
  return static_cast<int>(std::llround(span_km * 1000.0 / kOtdrResolutionM)) +
         1;
}

// One emulated OTDR trace: per-channel signal power along the span on the
// fine uniform grid, dBm.
struct RawTrace {
  int channel_index = 0;
  double spacing_m = 0.0;
  std::vector<double> samples_dbm;
};

struct SmootherSpec {
  int window = 19;      // odd sample count
  int poly_order = 2;

  void validate() const {
    if (window % 2 == 0 || window <= 0)
      throw std::invalid_argument("SmootherSpec: window must be odd and > 0");
    if (poly_order < 0 || poly_order >= window)
      throw std::invalid_argument("SmootherSpec: need window > poly_order >= 0");
  }
};

// Stands in for the physical OTDR measurement: per-channel traces from a
// fine-step simulation plus zero-mean Gaussian noise in the dB domain.
// Reproducible: channel c uses derive_seed(seed, c).
std::vector<RawTrace> otdr_emulate(const FineProfile& fine,
                                   double noise_sigma_db, std::uint64_t seed);

// Savitzky-Golay smoothing: each point replaced by the value at its own
// position of a least-squares polynomial fit over the centered window;
// windows are truncated (and refit) near the edges rather than padded.
std::vector<double> savgol_smooth(const std::vector<double>& samples,
                                  const SmootherSpec& spec);

// Linear interpolation of a uniform trace onto the distance grid. Every
// grid point must lie inside the trace span.
std::vector<double> downsample(const RawTrace& trace,
                               const DistanceGrid& target);

// Full measurement pipeline for one pump vector: fine simulation, OTDR
// noise, smoothing, downsampling. noise_sigma_db = 0 gives the noiseless
// synthetic path.
PowerProfile2D measure_profile(const PumpConfig& pumps,
                               const SimulationSetup& setup,
                               double noise_sigma_db, std::uint64_t seed,
                               const SmootherSpec& smoother = {});

}  // namespace raman
