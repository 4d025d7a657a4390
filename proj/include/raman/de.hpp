#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "raman/types.hpp"

namespace raman {

// Maximum absolute error between two profiles over all 44x100 cells, dB.
// (The figure of merit here is the worst cell, not an average.)
double mae_cost(const PowerProfile2D& p, const PowerProfile2D& target);
double mae_cost(const Matrix& a, const Matrix& b);

// Worst-over-distance spectral excursion: max_z [max_f - min_f], dB.
double j0(const PowerProfile2D& p);
double j0(const Matrix& m);

// Worst channel deviation from a flat target gain level, dB.
double j1(const GainSpectrum& gain, double target_gain_db);

// Which objective a design run minimizes.
struct TargetProfileSpec {
  PowerProfile2D target;
};
struct FlatGainSpec {
  double target_gain_db = 0.0;
  double m0 = 0.5;  // weight on spectral excursion
  double m1 = 0.5;  // weight on gain deviation
};
struct CostSpec {
  std::variant<TargetProfileSpec, FlatGainSpec> mode;

  void validate() const;
};

// pumps (dBm) -> measured or simulated profile.
using ProfileEvaluator = std::function<PowerProfile2D(const PumpVector&)>;
// pumps (dBm) -> scalar cost, dB.
using PumpCost = std::function<double(const PumpVector&)>;

// Binds a cost spec to an evaluator. FlatGain mode evaluates the pumps-off
// reference once up front and computes m0*J0 + m1*J1 per call; TargetProfile
// mode computes mae_cost against the target.
PumpCost make_cost(const CostSpec& spec, const ProfileEvaluator& evaluator,
                   const std::array<double, kNumPumps>& pump_freqs_thz);

double weighted_cost(const PumpVector& pumps, const CostSpec& spec,
                     const ProfileEvaluator& evaluator,
                     const std::array<double, kNumPumps>& pump_freqs_thz);

// DE search window around an inverse-model prediction: +/-50% of p' in
// linear power, converted back to dBm and intersected with the global box.
// An empty intersection on any pump falls back to the global bounds for
// that pump (with a warning on stderr).
PumpBounds cnn_init_bounds(const PumpVector& p_prime_dbm,
                           const PumpBounds& global);

struct DeParams {
  int population = 20;          // NP
  double differential_weight = 0.7;   // F
  double crossover_rate = 0.9;        // CR
  int max_iterations = 100;
  int stagnation_window = 30;
  double stagnation_tol_db = 1e-3;
  std::uint64_t seed = 0;
  bool parallel = true;  // population evaluations within a generation

  void validate() const;
};

struct DeInit {
  enum class Mode { Random, Seeded } mode = Mode::Random;
  PumpVector p_prime{};  // Seeded only

  static DeInit random() { return {}; }
  static DeInit seeded(const PumpVector& p_prime) {
    return {Mode::Seeded, p_prime};
  }
};

struct DeResult {
  PumpVector best_pumps{};
  double best_cost = 0.0;
  std::vector<double> history;  // best-so-far cost after init and each generation
  std::vector<PumpVector> best_pumps_history;
  long long evaluations = 0;
  PumpBounds bounds_used;  // effective bounds (Seeded init narrows them)
};

// DE/rand/1/bin with reflect-then-clip bound handling and greedy selection.
// Stops at max_iterations or when the best cost improves by less than
// stagnation_tol_db over stagnation_window generations. Fully deterministic
// for a seed: trial vectors are generated serially; only the pure cost
// evaluations run in parallel. A failed cost evaluation resamples that
// candidate once inside the bounds; a second failure aborts the run.
DeResult de_optimize(const PumpCost& cost, const PumpBounds& bounds,
                     const DeParams& params, const DeInit& init = {});

}  // namespace raman
