#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "raman/dataset.hpp"
#include "raman/nn_network.hpp"
#include "raman/types.hpp"

namespace raman {

using nn::ConvSpec;
using nn::ModelArchitecture;

// Profiles are standardized with one global mean/std (fitted on the training
// split); pump powers are min-max scaled to [0, 1] with the global bounds.
struct Normalization {
  bool fitted = false;
  double profile_mean = 0.0;
  double profile_std = 1.0;
  std::array<double, kNumPumps> pump_min{};
  std::array<double, kNumPumps> pump_max{};

  void require_fitted() const {
    if (!fitted)
      throw std::logic_error("Normalization: stats not fitted");
    if (!(profile_std > 0))
      throw std::logic_error("Normalization: profile std must be > 0");
  }
};

double normalize_profile_value(double dbm, const Normalization& n);
double denormalize_profile_value(double x, const Normalization& n);
std::array<double, kNumPumps> normalize_pumps(const PumpVector& p,
                                              const Normalization& n);
PumpVector denormalize_pumps(const std::array<double, kNumPumps>& y,
                             const Normalization& n);

// Fit profile stats on records [0, n_train) of the dataset; pump scaling
// comes from the global bounds, not the data.
Normalization fit_normalization(const Dataset& ds, int n_train,
                                const PumpBounds& global_bounds);

// Convolutional inverse model: 44x100 profile -> 4 pump powers.
struct InverseModel {
  ModelArchitecture arch;
  Normalization norm;
  std::vector<float> weights;

  void validate() const;
};

struct TrainConfig {
  int epochs = 150;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int early_stop_patience = 20;
  std::uint64_t seed = 1;
  int val_records = 300;  // taken from the tail of the dataset

  void validate() const;
};

struct TrainLog {
  std::vector<double> train_loss;  // per epoch, normalized MSE
  std::vector<double> val_loss;
  int best_epoch = -1;
};

// Minimizes MSE on normalized pumps with Adam; returns the weights of the
// best validation epoch. Deterministic for a seed (and independent of the
// worker count: per-sample gradients reduce in fixed chunk order).
InverseModel train(const Dataset& ds, const ModelArchitecture& arch,
                   const TrainConfig& cfg, const PumpBounds& global_bounds,
                   TrainLog* log = nullptr);

// Forward pass + denormalization, clamped into the global pump bounds.
PumpVector predict(const InverseModel& model, const PowerProfile2D& profile);

// Per-pump coefficient of determination, 1 - SS_res / SS_tot.
std::array<double, kNumPumps> r2_score(
    const std::vector<PumpVector>& truth, const std::vector<PumpVector>& pred);

struct MaeStatistics {
  double mean = 0.0;
  double std_dev = 0.0;  // sample std (n-1); 0 for a single value
  double fraction_below_half = 0.0;
  double fraction_below_one = 0.0;
  double bin_width = 0.1;
  std::vector<int> histogram;   // bin i covers [i*0.1, (i+1)*0.1)
  std::vector<double> cdf;      // fraction of errors < (i+1)*0.1
};

MaeStatistics mae_statistics(const std::vector<double>& errors_db);
double fraction_below(const std::vector<double>& errors_db, double level_db);

// File format (little-endian): magic "RINV", u16 version, architecture
// block, normalization block, u64 weight count, f32 weights in layer order
// (see nn_network.hpp).
void model_save(const InverseModel& model, const std::string& path);
InverseModel model_load(const std::string& path);

}  // namespace raman
