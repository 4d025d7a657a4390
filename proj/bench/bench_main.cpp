// Timings for the OpenMP kernels against their serial reference paths.
// Both paths must produce identical bytes; the benchmark checks that too.

#include <chrono>
#include <cstdio>
#include <vector>

#include "raman/dataset.hpp"
#include "raman/de.hpp"
#include "raman/experiments.hpp"
#include "raman/nn.hpp"
#include "raman/parallel.hpp"
#include "raman/pipeline.hpp"
#include "raman/setup.hpp"

using namespace raman;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <class F>
double time_it(F&& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return seconds(t0, t1) / reps;
}

void row(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s %10.4f s %10.4f s   x%.2f   %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  SimulationSetup setup;
  std::printf("%-28s %12s %12s %7s\n", "kernel", "serial", "openmp", "speedup");

  // span propagation (44 channels)
  {
    PumpVector p{19.0, 18.0, 17.0, 16.0};
    PropagationOptions ser = setup.prop, par = setup.prop;
    ser.parallel = false;
    par.parallel = true;
    PowerProfile2D a, b;
    const double ts = time_it(
        [&] { a = propagate(setup.pumps(p), setup.fiber, setup.fgrid,
                            setup.dgrid, ser); },
        20);
    const double tp = time_it(
        [&] { b = propagate(setup.pumps(p), setup.fiber, setup.fgrid,
                            setup.dgrid, par); },
        20);
    row("propagate 44x100", ts, tp, a.values.data == b.values.data);
  }

  // dataset generation (fine pipeline per record)
  {
    Dataset a, b;
    const double ts = time_it(
        [&] {
          a = gen_dataset(16, setup.experimental_bounds(), 7, 0.05, setup,
                          false);
        },
        1);
    const double tp = time_it(
        [&] {
          b = gen_dataset(16, setup.experimental_bounds(), 7, 0.05, setup,
                          true);
        },
        1);
    bool same = a.records.size() == b.records.size();
    for (std::size_t i = 0; same && i < a.records.size(); ++i)
      same = a.records[i].pumps_dbm == b.records[i].pumps_dbm &&
             a.records[i].profile_dbm == b.records[i].profile_dbm;
    row("gen_dataset 16 records", ts, tp, same);
  }

  // inverse-model training epochs (worker count changes nothing but time)
  {
    Dataset ds = gen_dataset(96, setup.experimental_bounds(), 3, 0.0, setup);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 32;
    cfg.val_records = 16;
    InverseModel m1, m2;
    set_max_threads(1);
    const double ts = time_it(
        [&] { m1 = train(ds, ModelArchitecture::canonical(), cfg,
                         setup.experimental_bounds()); },
        1);
    set_max_threads(0);
    const double tp = time_it(
        [&] { m2 = train(ds, ModelArchitecture::canonical(), cfg,
                         setup.experimental_bounds()); },
        1);
    row("train 2 epochs / 96 rec", ts, tp, m1.weights == m2.weights);
  }

  // DE generations with the simulator-backed cost
  {
    const ProfileEvaluator eval = simulator_evaluator(setup);
    const PowerProfile2D target = eval({18.0, 17.5, 17.0, 16.5});
    CostSpec spec{TargetProfileSpec{target}};
    const PumpCost cost = make_cost(spec, eval, setup.pump_freqs_thz);
    DeParams params;
    params.max_iterations = 10;
    params.seed = 5;
    DeResult r1, r2;
    params.parallel = false;
    const double ts = time_it(
        [&] { r1 = de_optimize(cost, setup.experimental_bounds(), params); }, 1);
    params.parallel = true;
    const double tp = time_it(
        [&] { r2 = de_optimize(cost, setup.experimental_bounds(), params); }, 1);
    row("de_optimize 10 gens", ts, tp,
        r1.best_pumps == r2.best_pumps && r1.history == r2.history);
  }

  return 0;
}
