#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "raman/pipeline.hpp"
#include "raman/setup.hpp"
#include "raman/types.hpp"

namespace raman {

struct DatasetRecord {
  std::array<float, kNumPumps> pumps_dbm{};
  std::vector<float> profile_dbm;  // kNumChannels * kNumDistancePoints, row-major
};

// Records share one grid pair. Seed and config hash describe how the set
// was generated; they travel in run manifests, not in the binary file.
struct Dataset {
  FrequencyGrid fgrid;
  DistanceGrid dgrid;
  std::vector<DatasetRecord> records;
  std::uint64_t seed = 0;
  std::string config_hash;

  PowerProfile2D profile(std::size_t idx) const;
};

// n records with pump vectors sampled uniformly (in dBm, per pump) inside
// bounds, profiles through the full measurement pipeline. Deterministic for
// a seed: record r derives its own RNG stream, so parallel and serial
// generation produce identical bytes.
Dataset gen_dataset(int n, const PumpBounds& bounds, std::uint64_t seed,
                    double noise_sigma_db, const SimulationSetup& setup,
                    bool parallel = true);

// Binary format (little-endian): magic "RDS1", u16 version, u32 record
// count, grid descriptor as six f64 (44, 100, f0, df, z0, dz), then per
// record 4 x f32 pump dBm + 4400 x f32 profile dBm.
void dataset_save(const Dataset& ds, const std::string& path);
Dataset dataset_load(const std::string& path);

// One record per row: pump powers then the 4400 profile cells.
void dataset_export_csv(const Dataset& ds, const std::string& path);

}  // namespace raman
