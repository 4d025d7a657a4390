#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "raman/defaults.hpp"
#include "raman/propagate.hpp"
#include "raman/raman_gain.hpp"
#include "raman/rng.hpp"
#include "raman/units.hpp"

using namespace raman;

TEST_CASE("dbm/mw conversions") {
  CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
  // closed form: 10^1.994
  CHECK(dbm_to_mw(19.94) == doctest::Approx(98.6).epsilon(1e-3));
  CHECK(mw_to_dbm(dbm_to_mw(-16.0)) == doctest::Approx(-16.0).epsilon(1e-12));
  CHECK(dbm_to_mw(kOffDbm) == 0.0);
  CHECK_THROWS_AS(mw_to_dbm(0.0), std::domain_error);
  CHECK_THROWS_AS(mw_to_dbm(-1.0), std::domain_error);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double dbm = rng.uniform(-40.0, 25.0);
    CHECK(mw_to_dbm(dbm_to_mw(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
  }
}

TEST_CASE("triangular gain curve") {
  const FiberParams f = default_fiber();
  const double peak = f.raman_peak_efficiency;
  CHECK(raman_gain_efficiency(0.0, f) == 0.0);
  CHECK(raman_gain_efficiency(-3.0, f) == 0.0);
  CHECK(raman_gain_efficiency(13.2, f) == doctest::Approx(peak));
  CHECK(raman_gain_efficiency(6.6, f) == doctest::Approx(0.5 * peak));
  CHECK(raman_gain_efficiency(15.0, f) == 0.0);
  CHECK(raman_gain_efficiency(17.0, f) == 0.0);
  // piecewise linearity on both sides
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 13.2);
    CHECK(raman_gain_efficiency(a, f) ==
          doctest::Approx(peak * a / 13.2).epsilon(1e-12));
    const double b = rng.uniform(13.2, 15.0);
    CHECK(raman_gain_efficiency(b, f) ==
          doctest::Approx(peak * (15.0 - b) / 1.8).epsilon(1e-9));
  }
}

TEST_CASE("grid invariants") {
  FrequencyGrid fg;
  CHECK(fg.size() == 44);
  CHECK(fg.freq(0) == doctest::Approx(191.8));
  CHECK(fg.freq(43) == doctest::Approx(196.1));
  for (int i = 1; i < 44; ++i)
    CHECK(fg.freq(i) - fg.freq(i - 1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(FrequencyGrid(192.0), std::invalid_argument);  // exits band
  CHECK_THROWS_AS(FrequencyGrid(191.0), std::invalid_argument);

  DistanceGrid dg;
  CHECK(dg.size() == 100);
  CHECK(dg.point(0) == doctest::Approx(0.5));
  CHECK(dg.point(99) == doctest::Approx(50.0));
  CHECK(dg.spacing() == doctest::Approx(0.5));
  CHECK_THROWS_AS(DistanceGrid(-1.0), std::invalid_argument);
}

TEST_CASE("pump config validation") {
  SUBCASE("frequencies must decrease and stay in band") {
    PumpConfig p = default_pumps({0, 0, 0, 0});
    CHECK_NOTHROW(p.validate(kExperimentalPumpMaxDbm));
    std::swap(p.freqs_thz[0], p.freqs_thz[3]);
    CHECK_THROWS_AS(p.validate(kExperimentalPumpMaxDbm), std::invalid_argument);
    p = default_pumps({0, 0, 0, 0});
    p.freqs_thz[0] = 212.0;
    CHECK_THROWS_AS(p.validate(kExperimentalPumpMaxDbm), std::invalid_argument);
  }
  SUBCASE("powers within [-5, max] or OFF") {
    CHECK_NOTHROW(default_pumps({-5, 20, 20, 19.94}).validate(kExperimentalPumpMaxDbm));
    CHECK_NOTHROW(default_pumps({kOffDbm, kOffDbm, kOffDbm, kOffDbm})
                      .validate(kExperimentalPumpMaxDbm));
    CHECK_THROWS_AS(default_pumps({-6, 0, 0, 0}).validate(kExperimentalPumpMaxDbm),
                    std::invalid_argument);
    CHECK_THROWS_AS(default_pumps({0, 0, 0, 20.5}).validate(kExperimentalPumpMaxDbm),
                    std::invalid_argument);
  }
}

TEST_CASE("pumps-off profile is pure fiber loss") {
  const FiberParams fiber = default_fiber();
  FrequencyGrid fg;
  DistanceGrid dg;
  const PowerProfile2D off =
      propagate(default_pumps({0, 0, 0, 0}).off(), fiber, fg, dg);
  for (int c = 0; c < fg.size(); ++c)
    for (int k = 0; k < dg.size(); ++k) {
      const double expected = -16.0 - fiber.alpha_signal_db_km * dg.point(k);
      CHECK(std::abs(off.at(c, k) - expected) < 1e-6);
    }
}

TEST_CASE("two-wave lossless photon flux conservation") {
  // co-propagating pump + signal, alpha = 0; P1/f1 + P2/f2 constant
  const std::vector<double> freqs{205.0, 191.8};
  const std::vector<double> alpha{0.0, 0.0};
  const std::vector<double> launch{100.0, 1.0};
  const Matrix out = integrate_copropagating(freqs, alpha, launch, 0.2525, 13.2,
                                             50.0, 500);
  const double flux0 = launch[0] / freqs[0] + launch[1] / freqs[1];
  for (int s = 0; s <= 500; ++s) {
    const double flux = out.at(0, s) / freqs[0] + out.at(1, s) / freqs[1];
    CHECK(std::abs(flux - flux0) / flux0 < 1e-6);
  }
  // the interaction actually moves power
  CHECK(out.at(1, 500) > 2.0);
  CHECK(out.at(0, 500) < 100.0);
}

TEST_CASE("on_off_gain basics") {
  FrequencyGrid fg;
  DistanceGrid dg;
  PowerProfile2D a(fg, dg), b(fg, dg);
  for (double& v : a.values.data) v = -20.0;
  b = a;
  GainSpectrum g = on_off_gain(a, b);
  for (double v : g.values_db) CHECK(v == 0.0);

  for (double& v : a.values.data) v += 3.0;
  g = on_off_gain(a, b);
  for (double v : g.values_db) CHECK(v == doctest::Approx(3.0));

  PowerProfile2D c(fg, DistanceGrid(25.0));
  CHECK_THROWS_AS(on_off_gain(a, c), std::invalid_argument);
}

TEST_CASE("max-pump on-off gain hits the calibration target") {
  const SimulationSetup setup{};
  const PowerProfile2D on = propagate(setup.pumps(setup.pump_max_dbm),
                                      setup.fiber, setup.fgrid, setup.dgrid);
  const PowerProfile2D off = propagate(setup.pumps(setup.pump_max_dbm).off(),
                                       setup.fiber, setup.fgrid, setup.dgrid);
  const GainSpectrum g = on_off_gain(on, off);
  double gmax = g.values_db[0];
  for (double v : g.values_db) gmax = std::max(gmax, v);
  CHECK(gmax == doctest::Approx(kMaxOnOffGainDb).epsilon(0.02));
}

TEST_CASE("calibrate_peak_efficiency reproduces the frozen constant") {
  const SimulationSetup setup{};
  const double eff =
      calibrate_peak_efficiency(setup.fiber, setup.pumps(setup.pump_max_dbm),
                                setup.fgrid, setup.dgrid, kMaxOnOffGainDb);
  CHECK(eff == doctest::Approx(kCalibratedPeakEfficiency).epsilon(1e-4));
}

TEST_CASE("monotone mean gain in each pump power") {
  const SimulationSetup setup{};
  const PowerProfile2D off = propagate(setup.pumps(setup.pump_max_dbm).off(),
                                       setup.fiber, setup.fgrid, setup.dgrid);
  auto mean_gain = [&](const PumpVector& p) {
    const PowerProfile2D on =
        propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid);
    const GainSpectrum g = on_off_gain(on, off);
    double m = 0;
    for (double v : g.values_db) m += v;
    return m / kNumChannels;
  };

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    PumpVector p;
    for (int j = 0; j < kNumPumps; ++j) p[j] = rng.uniform(-5.0, 18.0);
    const double base = mean_gain(p);
    const int j = trial % kNumPumps;
    PumpVector up = p;
    up[j] += 1.0;
    CHECK(mean_gain(up) >= base - 1e-3);
  }
}

TEST_CASE("grid determinism and serial/parallel identity") {
  const SimulationSetup setup{};
  const PumpVector p{19.0, 12.0, 8.0, 17.0};
  PropagationOptions serial = setup.prop, parallel = setup.prop;
  serial.parallel = false;
  parallel.parallel = true;

  const PowerProfile2D a =
      propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid, serial);
  const PowerProfile2D b =
      propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid, parallel);
  const PowerProfile2D c =
      propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid, parallel);
  CHECK(a.values.data == b.values.data);  // bit-identical
  CHECK(b.values.data == c.values.data);
}

TEST_CASE("step halving changes profiles below tolerance") {
  const SimulationSetup setup{};
  const PumpVector p{20.0, 20.0, 20.0, 19.94};
  PropagationOptions coarse = setup.prop, fine = setup.prop;
  fine.step_km = coarse.step_km / 2;
  const PowerProfile2D a =
      propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid, coarse);
  const PowerProfile2D b =
      propagate(setup.pumps(p), setup.fiber, setup.fgrid, setup.dgrid, fine);
  double worst = 0;
  for (std::size_t i = 0; i < a.values.data.size(); ++i)
    worst = std::max(worst, std::abs(a.values.data[i] - b.values.data[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("propagate input validation") {
  const SimulationSetup setup{};
  PropagationOptions bad = setup.prop;
  bad.step_km = 0.3;  // does not divide 0.5 km grid points
  CHECK_THROWS_AS(propagate(setup.pumps({0, 0, 0, 0}), setup.fiber, setup.fgrid,
                            setup.dgrid, bad),
                  std::invalid_argument);
  FiberParams f = setup.fiber;
  f.alpha_signal_db_km = -0.1;
  CHECK_THROWS_AS(
      propagate(setup.pumps({0, 0, 0, 0}), f, setup.fgrid, setup.dgrid),
      std::invalid_argument);
}
