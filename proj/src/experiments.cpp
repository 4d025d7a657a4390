#include "raman/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "raman/errors.hpp"
#include "raman/rng.hpp"

namespace raman {

ProfileEvaluator simulator_evaluator(const SimulationSetup& setup) {
  return [setup](const PumpVector& powers) {
    return propagate(setup.pumps(powers), setup.fiber, setup.fgrid, setup.dgrid,
                     setup.prop);
  };
}

PumpPredictor model_predictor(const InverseModel& model) {
  return [model](const PowerProfile2D& p) { return predict(model, p); };
}

TestsetEvalResult run_testset_eval(const PumpPredictor& predictor,
                                   const Dataset& test_set,
                                   const ProfileEvaluator& evaluator) {
  TestsetEvalResult res;
  const int n = static_cast<int>(test_set.records.size());
  for (int i = 0; i < n; ++i) {
    const PowerProfile2D target = test_set.profile(i);
    try {
      const PumpVector p = predictor(target);
      const PowerProfile2D designed = evaluator(p);
      const double err = mae_cost(designed, target);
      res.predicted_pumps.push_back(p);
      res.per_profile_mae.push_back(err);
      if (err > 1.0)
        res.high_error.push_back(static_cast<int>(res.per_profile_mae.size()) - 1);
    } catch (const std::exception&) {
      res.failed.push_back(i);
    }
  }
  if (!res.per_profile_mae.empty())
    res.stats = mae_statistics(res.per_profile_mae);
  return res;
}

namespace {

// Best-so-far cost at iteration k, runs shorter than `len` carry their final
// value forward.
void accumulate_curve(std::vector<double>& acc, const std::vector<double>& h,
                      std::size_t len) {
  acc.resize(std::max(acc.size(), len), 0.0);
  for (std::size_t k = 0; k < len; ++k)
    acc[k] += k < h.size() ? h[k] : h.back();
}

}  // namespace

ComparisonReport run_de_comparison(const std::vector<PowerProfile2D>& targets,
                                   const PumpPredictor& predictor,
                                   const ProfileEvaluator& evaluator,
                                   const DeComparisonConfig& cfg) {
  if (targets.size() < 2)
    throw std::invalid_argument("run_de_comparison: need >= 2 profiles");
  cfg.de.validate();
  cfg.global_bounds.validate();

  ComparisonReport rep;
  const std::size_t curve_len =
      static_cast<std::size_t>(cfg.de.max_iterations) + 1;
  std::vector<double> seeded_acc, random_acc;
  long long n_runs = 0;

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const PowerProfile2D& target = targets[t];
    CostSpec spec{TargetProfileSpec{target}};
    const PumpCost cost = make_cost(spec, evaluator, {});

    const PumpVector p_prime = predictor(target);
    rep.cnn_mae.push_back(cost(p_prime));

    double seeded_sum = 0.0, random_sum = 0.0;
    for (int rep_i = 0; rep_i < cfg.repetitions; ++rep_i) {
      DeParams params = cfg.de;
      params.seed = derive_seed(cfg.seed, t * 1000 + rep_i);

      DeResult seeded = de_optimize(cost, cfg.global_bounds, params,
                                    DeInit::seeded(p_prime));
      DeResult random =
          de_optimize(cost, cfg.global_bounds, params, DeInit::random());
      seeded_sum += seeded.best_cost;
      random_sum += random.best_cost;
      accumulate_curve(seeded_acc, seeded.history, curve_len);
      accumulate_curve(random_acc, random.history, curve_len);
      ++n_runs;
    }
    rep.seeded_de_mae.push_back(seeded_sum / cfg.repetitions);
    rep.random_de_mae.push_back(random_sum / cfg.repetitions);
  }

  rep.seeded_curve = seeded_acc;
  rep.random_curve = random_acc;
  for (double& v : rep.seeded_curve) v /= static_cast<double>(n_runs);
  for (double& v : rep.random_curve) v /= static_cast<double>(n_runs);
  return rep;
}

std::vector<double> equally_spaced_levels(double start_db, double end_db,
                                          int count) {
  if (count < 1)
    throw std::invalid_argument("equally_spaced_levels: count must be >= 1");
  std::vector<double> levels(count);
  if (count == 1) {
    levels[0] = start_db;
    return levels;
  }
  const double step = (end_db - start_db) / (count - 1);
  for (int i = 0; i < count; ++i) levels[i] = start_db + i * step;
  return levels;
}

SweepReport run_flat_gain_sweep(const std::vector<double>& levels_db,
                                double pump_cap_dbm, int iterations,
                                const SimulationSetup& setup,
                                std::uint64_t seed, double m0, double m1) {
  const ProfileEvaluator evaluator = simulator_evaluator(setup);
  PumpBounds bounds;
  bounds.lower.fill(setup.pump_min_dbm);
  bounds.upper.fill(pump_cap_dbm);
  bounds.validate();

  SweepReport rep;
  const PumpVector off_pumps = [] {
    PumpVector p;
    p.fill(kOffDbm);
    return p;
  }();
  const PowerProfile2D off_profile = evaluator(off_pumps);

  for (std::size_t li = 0; li < levels_db.size(); ++li) {
    CostSpec spec{FlatGainSpec{levels_db[li], m0, m1}};
    const PumpCost cost = make_cost(spec, evaluator, setup.pump_freqs_thz);

    DeParams params;
    params.max_iterations = iterations;
    params.seed = derive_seed(seed, li);
    const DeResult r = de_optimize(cost, bounds, params, DeInit::random());

    SweepRow row;
    row.target_gain_db = levels_db[li];
    row.pumps = r.best_pumps;
    row.weighted_cost_db = r.best_cost;
    const PowerProfile2D prof = evaluator(r.best_pumps);
    row.j0_db = j0(prof);
    row.j1_db = j1(on_off_gain(prof, off_profile), levels_db[li]);
    rep.rows.push_back(row);
    rep.curves.push_back(r.history);
  }
  return rep;
}

void write_eval_report_csv(const TestsetEvalResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_eval_report_csv: cannot open " + path);
  out << "profile,mae_db,p1_dbm,p2_dbm,p3_dbm,p4_dbm,high_error\n";
  char line[256];
  for (std::size_t i = 0; i < r.per_profile_mae.size(); ++i) {
    const bool high =
        std::find(r.high_error.begin(), r.high_error.end(),
                  static_cast<int>(i)) != r.high_error.end();
    std::snprintf(line, sizeof line, "%zu,%.6f,%.4f,%.4f,%.4f,%.4f,%d\n", i,
                  r.per_profile_mae[i], r.predicted_pumps[i][0],
                  r.predicted_pumps[i][1], r.predicted_pumps[i][2],
                  r.predicted_pumps[i][3], high ? 1 : 0);
    out << line;
  }
  if (!out) throw IoError("write_eval_report_csv: write failed");
}

void write_comparison_csv(const ComparisonReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_comparison_csv: cannot open " + path);
  out << "profile,cnn_mae_db,seeded_de_mae_db,random_de_mae_db\n";
  char line[160];
  for (std::size_t i = 0; i < r.cnn_mae.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f\n", i, r.cnn_mae[i],
                  r.seeded_de_mae[i], r.random_de_mae[i]);
    out << line;
  }
  out << "\niteration,seeded_mean_cost_db,random_mean_cost_db\n";
  for (std::size_t k = 0; k < r.seeded_curve.size(); ++k) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", k, r.seeded_curve[k],
                  r.random_curve[k]);
    out << line;
  }
  if (!out) throw IoError("write_comparison_csv: write failed");
}

void write_sweep_csv(const SweepReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_sweep_csv: cannot open " + path);
  out << "target_gain_db,j0_db,j1_db,weighted_cost_db,p1_dbm,p2_dbm,p3_dbm,"
         "p4_dbm\n";
  char line[224];
  for (const SweepRow& row : r.rows) {
    std::snprintf(line, sizeof line,
                  "%.4f,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f,%.4f\n",
                  row.target_gain_db, row.j0_db, row.j1_db,
                  row.weighted_cost_db, row.pumps[0], row.pumps[1],
                  row.pumps[2], row.pumps[3]);
    out << line;
  }
  if (!out) throw IoError("write_sweep_csv: write failed");
}

void write_history_csv(const DeResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_history_csv: cannot open " + path);
  out << "iteration,best_cost_db,p1_dbm,p2_dbm,p3_dbm,p4_dbm\n";
  char line[192];
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const PumpVector& p = r.best_pumps_history[k];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.4f,%.4f,%.4f,%.4f\n", k,
                  r.history[k], p[0], p[1], p[2], p[3]);
    out << line;
  }
  if (!out) throw IoError("write_history_csv: write failed");
}

}  // namespace raman
