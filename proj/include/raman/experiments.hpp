#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "raman/dataset.hpp"
#include "raman/de.hpp"
#include "raman/nn.hpp"
#include "raman/setup.hpp"

namespace raman {

// profile -> pump powers. Usually a trained InverseModel; tests can plug in
// an oracle.
using PumpPredictor = std::function<PumpVector(const PowerProfile2D&)>;

ProfileEvaluator simulator_evaluator(const SimulationSetup& setup);
PumpPredictor model_predictor(const InverseModel& model);

// Per test record: predict pumps from the target profile, re-simulate,
// score the worst-cell error against the target. Records whose simulation
// fails are flagged and skipped.
struct TestsetEvalResult {
  std::vector<double> per_profile_mae;       // dB, one per evaluated record
  std::vector<PumpVector> predicted_pumps;
  std::vector<int> high_error;               // indices with MAE > 1 dB
  std::vector<int> failed;                   // indices whose evaluation failed
  MaeStatistics stats;
};

TestsetEvalResult run_testset_eval(const PumpPredictor& predictor,
                                   const Dataset& test_set,
                                   const ProfileEvaluator& evaluator);

// Random-init vs model-seeded DE on a set of target profiles, several seeded
// repetitions each. Average curves carry the best-so-far cost per iteration
// (shorter runs extend with their final value).
struct DeComparisonConfig {
  DeParams de;
  PumpBounds global_bounds;
  int repetitions = 10;
  std::uint64_t seed = 0;
};

struct ComparisonReport {
  std::vector<double> cnn_mae;        // per profile, model prediction alone
  std::vector<double> seeded_de_mae;  // per profile, mean final cost
  std::vector<double> random_de_mae;
  std::vector<double> seeded_curve;   // mean best-so-far cost per iteration
  std::vector<double> random_curve;
};

ComparisonReport run_de_comparison(const std::vector<PowerProfile2D>& targets,
                                   const PumpPredictor& predictor,
                                   const ProfileEvaluator& evaluator,
                                   const DeComparisonConfig& cfg);

// Flat-gain sweep: per target level, minimize m0*J0 + m1*J1 under a uniform
// pump power cap.
struct SweepRow {
  double target_gain_db = 0.0;
  double j0_db = 0.0;
  double j1_db = 0.0;
  double weighted_cost_db = 0.0;
  PumpVector pumps{};
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::vector<double>> curves;  // per level, best cost history
};

std::vector<double> equally_spaced_levels(double start_db, double end_db,
                                          int count);

SweepReport run_flat_gain_sweep(const std::vector<double>& levels_db,
                                double pump_cap_dbm, int iterations,
                                const SimulationSetup& setup,
                                std::uint64_t seed, double m0 = 0.5,
                                double m1 = 0.5);

// Report serialization (CSV + JSON summary) used by the CLI.
void write_eval_report_csv(const TestsetEvalResult& r, const std::string& path);
void write_comparison_csv(const ComparisonReport& r, const std::string& path);
void write_sweep_csv(const SweepReport& r, const std::string& path);
void write_history_csv(const DeResult& r, const std::string& path);

}  // namespace raman
