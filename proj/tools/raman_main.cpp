// Command-line front end: simulate | gen-dataset | train | eval | design |
// sweep | calibrate. Every run writes a manifest.json with the resolved
// arguments, seeds and config hash, so results can be regenerated from the
// manifest alone.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "raman/config.hpp"
#include "raman/csvio.hpp"
#include "raman/dataset.hpp"
#include "raman/de.hpp"
#include "raman/errors.hpp"
#include "raman/experiments.hpp"
#include "raman/nn.hpp"
#include "raman/parallel.hpp"
#include "raman/pipeline.hpp"
#include "raman/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace raman;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
};

SimulationSetup resolve_setup(const CommonArgs& args) {
  set_max_threads(args.threads);
  if (args.config_path.empty()) return SimulationSetup{};
  return load_setup(args.config_path);
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw ConfigError("--out directory is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + out);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& arguments, const SimulationSetup& setup,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["arguments"] = arguments;
  m["config_hash"] = setup_hash(setup);
  m["config"] = serialize_setup(setup);
  m["outputs"] = outputs;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest.json");
  out << m.dump(2) << "\n";
}

PumpVector parse_pumps(const std::string& text) {
  if (text == "off") {
    PumpVector p;
    p.fill(kOffDbm);
    return p;
  }
  PumpVector p{};
  std::stringstream ss(text);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n >= kNumPumps)
      throw ConfigError("--pumps: expected 4 comma-separated dBm values");
    try {
      p[n++] = std::stod(item);
    } catch (const std::exception&) {
      throw ConfigError("--pumps: '" + item + "' is not a number");
    }
  }
  if (n != kNumPumps)
    throw ConfigError("--pumps: expected 4 comma-separated dBm values");
  return p;
}

int cmd_simulate(const CommonArgs& common, const std::string& pumps_text,
                 bool emit_svg, bool through_pipeline) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);
  const PumpVector powers = parse_pumps(pumps_text);
  const PumpConfig pumps = setup.pumps(powers);
  pumps.validate(setup.pump_max_dbm);

  const PowerProfile2D profile =
      through_pipeline
          ? measure_profile(pumps, setup, setup.otdr_noise_sigma_db,
                            common.seed)
          : propagate(pumps, setup.fiber, setup.fgrid, setup.dgrid, setup.prop);

  std::vector<std::string> outputs{"profile.csv"};
  profile_save_csv(profile, (dir / "profile.csv").string());
  if (emit_svg) {
    svg_heatmap(profile.values, "signal power (dBm)",
                (dir / "profile.svg").string());
    outputs.push_back("profile.svg");
  }

  json args;
  args["pumps"] = pumps_text;
  args["seed"] = common.seed;
  args["pipeline"] = through_pipeline;
  args["svg"] = emit_svg;
  write_manifest(dir, "simulate", args, setup, outputs);
  std::cout << "wrote " << (dir / "profile.csv").string() << "\n";
  return 0;
}

int cmd_gen_dataset(const CommonArgs& common, int n, double noise,
                    bool export_csv) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);
  const double sigma = noise < 0 ? setup.otdr_noise_sigma_db : noise;

  Dataset ds = gen_dataset(n, setup.experimental_bounds(), common.seed, sigma,
                           setup);
  ds.config_hash = setup_hash(setup);
  dataset_save(ds, (dir / "dataset.rds").string());
  std::vector<std::string> outputs{"dataset.rds"};
  if (export_csv) {
    dataset_export_csv(ds, (dir / "dataset.csv").string());
    outputs.push_back("dataset.csv");
  }

  json args;
  args["n"] = n;
  args["seed"] = common.seed;
  args["noise_sigma_db"] = sigma;
  write_manifest(dir, "gen-dataset", args, setup, outputs);
  std::cout << "wrote " << (dir / "dataset.rds").string() << " (" << n
            << " records)\n";
  return 0;
}

int cmd_train(const CommonArgs& common, const std::string& dataset_path,
              int epochs, int batch, double lr, int patience, int val_records) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);
  const Dataset ds = dataset_load(dataset_path);

  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.early_stop_patience = patience;
  cfg.val_records = val_records;
  cfg.seed = common.seed;

  TrainLog log;
  const InverseModel model = train(ds, ModelArchitecture::canonical(), cfg,
                                   setup.experimental_bounds(), &log);
  model_save(model, (dir / "model.rinv").string());

  std::ofstream curve(dir / "training_log.csv");
  if (!curve) throw IoError("cannot write training_log.csv");
  curve << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < log.train_loss.size(); ++e)
    curve << e << "," << log.train_loss[e] << "," << log.val_loss[e] << "\n";

  json args;
  args["dataset"] = dataset_path;
  args["epochs"] = epochs;
  args["batch"] = batch;
  args["lr"] = lr;
  args["patience"] = patience;
  args["val"] = val_records;
  args["seed"] = common.seed;
  write_manifest(dir, "train", args, setup,
                 {"model.rinv", "training_log.csv"});
  std::cout << "best epoch " << log.best_epoch << ", val MSE "
            << (log.best_epoch >= 0 ? log.val_loss[log.best_epoch] : -1.0)
            << "; wrote " << (dir / "model.rinv").string() << "\n";
  return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& model_path,
             const std::string& dataset_path) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);
  const InverseModel model = model_load(model_path);
  const Dataset test = dataset_load(dataset_path);

  const TestsetEvalResult res = run_testset_eval(
      model_predictor(model), test, simulator_evaluator(setup));
  write_eval_report_csv(res, (dir / "eval_report.csv").string());

  json summary;
  summary["profiles"] = res.per_profile_mae.size();
  summary["mean_mae_db"] = res.stats.mean;
  summary["std_mae_db"] = res.stats.std_dev;
  summary["fraction_below_0.5db"] = res.stats.fraction_below_half;
  summary["fraction_below_1db"] = res.stats.fraction_below_one;
  summary["high_error_count"] = res.high_error.size();
  summary["failed_count"] = res.failed.size();
  std::ofstream sum(dir / "eval_summary.json");
  sum << summary.dump(2) << "\n";

  json args;
  args["model"] = model_path;
  args["dataset"] = dataset_path;
  write_manifest(dir, "eval", args, setup,
                 {"eval_report.csv", "eval_summary.json"});
  std::cout << "mean MAE " << res.stats.mean << " dB over "
            << res.per_profile_mae.size() << " profiles ("
            << res.high_error.size() << " above 1 dB)\n";
  return 0;
}

int cmd_design(const CommonArgs& common, const std::string& target_path,
               const std::string& init_mode, const std::string& model_path,
               int max_iter, int np, bool emit_svg) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);
  const PowerProfile2D target = profile_load_csv(target_path);

  const ProfileEvaluator evaluator = simulator_evaluator(setup);
  CostSpec spec{TargetProfileSpec{target}};
  const PumpCost cost = make_cost(spec, evaluator, setup.pump_freqs_thz);

  DeParams params;
  params.max_iterations = max_iter;
  params.population = np;
  params.seed = common.seed;

  DeInit init = DeInit::random();
  if (init_mode == "cnn") {
    if (model_path.empty())
      throw ConfigError("--init cnn requires --model");
    const InverseModel model = model_load(model_path);
    init = DeInit::seeded(predict(model, target));
  } else if (init_mode != "random") {
    throw ConfigError("--init must be 'random' or 'cnn'");
  }

  const DeResult res =
      de_optimize(cost, setup.experimental_bounds(), params, init);
  write_history_csv(res, (dir / "history.csv").string());
  const PowerProfile2D designed = evaluator(res.best_pumps);
  profile_save_csv(designed, (dir / "designed_profile.csv").string());

  json summary;
  summary["best_cost_db"] = res.best_cost;
  summary["best_pumps_dbm"] = res.best_pumps;
  summary["evaluations"] = res.evaluations;
  summary["iterations"] = res.history.size() - 1;
  if (init.mode == DeInit::Mode::Seeded) summary["p_prime_dbm"] = init.p_prime;
  std::ofstream sum(dir / "design_summary.json");
  sum << summary.dump(2) << "\n";

  std::vector<std::string> outputs{"history.csv", "designed_profile.csv",
                                   "design_summary.json"};
  if (emit_svg) {
    Matrix err(kNumChannels, kNumDistancePoints);
    for (std::size_t i = 0; i < err.data.size(); ++i)
      err.data[i] = std::abs(designed.values.data[i] - target.values.data[i]);
    svg_heatmap(err, "abs error (dB)", (dir / "error_heatmap.svg").string());
    svg_lines({res.history}, {"best cost"}, "DE convergence (dB)",
              (dir / "convergence.svg").string());
    outputs.push_back("error_heatmap.svg");
    outputs.push_back("convergence.svg");
  }

  json args;
  args["target"] = target_path;
  args["init"] = init_mode;
  args["model"] = model_path;
  args["max_iter"] = max_iter;
  args["np"] = np;
  args["seed"] = common.seed;
  write_manifest(dir, "design", args, setup, outputs);
  std::cout << "best MAE " << res.best_cost << " dB after "
            << res.history.size() - 1 << " iterations; pumps ["
            << res.best_pumps[0] << ", " << res.best_pumps[1] << ", "
            << res.best_pumps[2] << ", " << res.best_pumps[3] << "] dBm\n";
  return 0;
}

int cmd_sweep(const CommonArgs& common, double gain_start, double gain_end,
              int levels, double pump_cap, int max_iter, double m0, double m1,
              bool emit_svg) {
  const SimulationSetup setup = resolve_setup(common);
  const fs::path dir = prepare_out_dir(common.out_dir);

  const std::vector<double> targets =
      equally_spaced_levels(gain_start, gain_end, levels);
  const SweepReport rep = run_flat_gain_sweep(targets, pump_cap, max_iter,
                                              setup, common.seed, m0, m1);
  write_sweep_csv(rep, (dir / "sweep_report.csv").string());

  json summary = json::array();
  for (const SweepRow& row : rep.rows) {
    json r;
    r["target_gain_db"] = row.target_gain_db;
    r["j0_db"] = row.j0_db;
    r["j1_db"] = row.j1_db;
    r["weighted_cost_db"] = row.weighted_cost_db;
    r["pumps_dbm"] = row.pumps;
    summary.push_back(r);
  }
  std::ofstream sum(dir / "sweep_summary.json");
  sum << summary.dump(2) << "\n";

  std::vector<std::string> outputs{"sweep_report.csv", "sweep_summary.json"};
  if (emit_svg) {
    std::vector<std::string> labels;
    for (const SweepRow& row : rep.rows) {
      char lab[32];
      std::snprintf(lab, sizeof lab, "g_t=%.2f dB", row.target_gain_db);
      labels.push_back(lab);
    }
    svg_lines(rep.curves, labels, "sweep convergence (dB)",
              (dir / "sweep_convergence.svg").string());
    outputs.push_back("sweep_convergence.svg");
  }

  json args;
  args["gain_start"] = gain_start;
  args["gain_end"] = gain_end;
  args["levels"] = levels;
  args["pump_cap"] = pump_cap;
  args["max_iter"] = max_iter;
  args["m0"] = m0;
  args["m1"] = m1;
  args["seed"] = common.seed;
  write_manifest(dir, "sweep", args, setup, outputs);
  for (const SweepRow& row : rep.rows)
    std::cout << "g_t=" << row.target_gain_db << " dB: cost "
              << row.weighted_cost_db << " dB (J0 " << row.j0_db << ", J1 "
              << row.j1_db << ")\n";
  return 0;
}

int cmd_calibrate(const CommonArgs& common, double target_gain) {
  const SimulationSetup setup = resolve_setup(common);
  PumpConfig pumps = setup.pumps(setup.pump_max_dbm);
  const double eff = calibrate_peak_efficiency(
      setup.fiber, pumps, setup.fgrid, setup.dgrid, target_gain, setup.prop);
  std::cout << "fiber.raman_peak_efficiency = " << std::setprecision(12) << eff
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raman amplifier power-profile design toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "key-value config file")
      ->expected(1);
  app.add_option("--threads", common.threads, "worker cap (0 = all cores)");

  auto add_common = [&](CLI::App* sub, bool needs_out = true) {
    sub->add_option("--config", common.config_path, "key-value config file");
    sub->add_option("--seed", common.seed, "RNG seed");
    sub->add_option("--threads", common.threads, "worker cap");
    if (needs_out)
      sub->add_option("--out", common.out_dir, "output directory")->required();
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the span simulator once");
  std::string pumps_text;
  bool sim_svg = false, sim_pipeline = false;
  sim->add_option("--pumps", pumps_text,
                  "p1,p2,p3,p4 pump powers in dBm, or 'off'")
      ->required();
  sim->add_flag("--svg", sim_svg, "emit a heatmap SVG");
  sim->add_flag("--pipeline", sim_pipeline,
                "run through the OTDR measurement pipeline");
  add_common(sim);

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset",
                                 "generate (pumps, profile) records");
  int gen_n = 100;
  double gen_noise = -1.0;
  bool gen_csv = false;
  gen->add_option("--n", gen_n, "record count")->required();
  gen->add_option("--noise", gen_noise,
                  "OTDR noise sigma in dB (default: config value)");
  gen->add_flag("--csv", gen_csv, "also export CSV");
  add_common(gen);

  // train
  auto* tr = app.add_subcommand("train", "train the inverse model");
  std::string tr_dataset;
  int tr_epochs = 150, tr_batch = 32, tr_patience = 20, tr_val = 300;
  double tr_lr = 1e-3;
  tr->add_option("--dataset", tr_dataset, "training dataset (.rds)")
      ->required();
  tr->add_option("--epochs", tr_epochs, "epoch cap");
  tr->add_option("--batch", tr_batch, "batch size");
  tr->add_option("--lr", tr_lr, "learning rate");
  tr->add_option("--patience", tr_patience, "early-stop patience");
  tr->add_option("--val", tr_val, "validation records (dataset tail)");
  add_common(tr);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a model on a test dataset");
  std::string ev_model, ev_dataset;
  ev->add_option("--model", ev_model, "model file (.rinv)")->required();
  ev->add_option("--dataset", ev_dataset, "test dataset (.rds)")->required();
  add_common(ev);

  // design
  auto* de = app.add_subcommand("design",
                                "optimize pumps for a target 2D profile");
  std::string de_target, de_init = "random", de_model;
  int de_iter = 100, de_np = 20;
  bool de_svg = false;
  de->add_option("--target", de_target, "target profile CSV")->required();
  de->add_option("--init", de_init, "population init: random | cnn");
  de->add_option("--model", de_model, "inverse model for --init cnn");
  de->add_option("--max-iter", de_iter, "DE iteration cap");
  de->add_option("--np", de_np, "DE population size");
  de->add_flag("--svg", de_svg, "emit error heatmap and convergence SVGs");
  add_common(de);

  // sweep
  auto* sw = app.add_subcommand("sweep", "flat-gain multi-objective sweep");
  double sw_start = 0.7, sw_end = 6.3, sw_cap = kSimPumpCapDbm, sw_m0 = 0.5,
         sw_m1 = 0.5;
  int sw_levels = 9, sw_iter = 300;
  bool sw_svg = false;
  sw->add_option("--gain-start", sw_start, "first target gain, dB");
  sw->add_option("--gain-end", sw_end, "last target gain, dB");
  sw->add_option("--levels", sw_levels, "level count");
  sw->add_option("--pump-cap", sw_cap, "uniform pump power cap, dBm");
  sw->add_option("--max-iter", sw_iter, "DE iteration cap");
  sw->add_option("--m0", sw_m0, "weight on spectral excursion J0");
  sw->add_option("--m1", sw_m1, "weight on gain deviation J1");
  sw->add_flag("--svg", sw_svg, "emit convergence SVG");
  add_common(sw);

  // calibrate
  auto* cal = app.add_subcommand(
      "calibrate", "solve the Raman peak efficiency for a target max gain");
  double cal_gain = kMaxOnOffGainDb;
  cal->add_option("--target-gain", cal_gain, "max on-off gain target, dB");
  add_common(cal, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, pumps_text, sim_svg, sim_pipeline);
    if (gen->parsed()) return cmd_gen_dataset(common, gen_n, gen_noise, gen_csv);
    if (tr->parsed())
      return cmd_train(common, tr_dataset, tr_epochs, tr_batch, tr_lr,
                       tr_patience, tr_val);
    if (ev->parsed()) return cmd_eval(common, ev_model, ev_dataset);
    if (de->parsed())
      return cmd_design(common, de_target, de_init, de_model, de_iter, de_np,
                        de_svg);
    if (sw->parsed())
      return cmd_sweep(common, sw_start, sw_end, sw_levels, sw_cap, sw_iter,
                       sw_m0, sw_m1, sw_svg);
    if (cal->parsed()) return cmd_calibrate(common, cal_gain);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
