#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace raman {

inline constexpr int kNumChannels = 44;
inline constexpr int kNumDistancePoints = 100;
inline constexpr double kChannelSpacingThz = 0.1;  // 100 GHz
inline constexpr double kBandLowThz = 191.8;
inline constexpr double kBandHighThz = 196.2;

// 44 signal channels on a 100 GHz comb. The C-band window [191.8, 196.2] THz
// holds 45 comb lines, one more than the channel count, so the grid is
// anchored at the low edge; see README for the rationale.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(double first_freq_thz = kBandLowThz)
      : first_(first_freq_thz) {
    const double last = first_ + (kNumChannels - 1) * kChannelSpacingThz;
    if (first_ < kBandLowThz - 1e-9 || last > kBandHighThz + 1e-9)
      throw std::invalid_argument(
          "FrequencyGrid: 44 channels at 0.1 THz starting at " +
          std::to_string(first_) + " THz leave the [191.8, 196.2] THz band");
  }

  int size() const { return kNumChannels; }
  double spacing() const { return kChannelSpacingThz; }
  double freq(int i) const { return first_ + i * kChannelSpacingThz; }
  double first() const { return first_; }
  double last() const { return freq(kNumChannels - 1); }

  std::vector<double> channel_freqs() const {
    std::vector<double> f(kNumChannels);
    for (int i = 0; i < kNumChannels; ++i) f[i] = freq(i);
    return f;
  }

  bool operator==(const FrequencyGrid& o) const {
    return std::abs(first_ - o.first_) < 1e-12;
  }

 private:
  double first_;
};

// 100 uniform distance samples z_k = dz*(k+1); the last point lands exactly
// on the span end so the on-off gain can be read at z = L. z = 0 is the
// launch and is not part of the grid.
class DistanceGrid {
 public:
  explicit DistanceGrid(double span_km = 50.0) : span_(span_km) {
    if (!(span_km > 0.0))
      throw std::invalid_argument("DistanceGrid: span must be > 0 km");
  }

  int size() const { return kNumDistancePoints; }
  double spacing() const { return span_ / kNumDistancePoints; }
  double point(int k) const { return spacing() * (k + 1); }
  double span() const { return span_; }

  std::vector<double> points() const {
    std::vector<double> z(kNumDistancePoints);
    for (int k = 0; k < kNumDistancePoints; ++k) z[k] = point(k);
    return z;
  }

  bool operator==(const DistanceGrid& o) const {
    return std::abs(span_ - o.span_) < 1e-12;
  }

 private:
  double span_;
};

}  // namespace raman
