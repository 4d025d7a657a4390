#pragma once

#include "raman/defaults.hpp"
#include "raman/propagate.hpp"
#include "raman/types.hpp"

namespace raman {

// Everything needed to turn a pump power vector into a profile: fiber,
// pump comb, grids and integrator settings. Built from defaults or from a
// key-value config file (see config.hpp).
struct SimulationSetup {
  FiberParams fiber;
  std::array<double, kNumPumps> pump_freqs_thz = kDefaultPumpFreqsThz;
  PumpVector pump_max_dbm = kExperimentalPumpMaxDbm;
  double pump_min_dbm = kPumpMinDbm;
  FrequencyGrid fgrid;
  DistanceGrid dgrid;
  PropagationOptions prop;
  double otdr_noise_sigma_db = 0.05;

  SimulationSetup() : fiber(default_fiber()), fgrid(), dgrid() {}

  PumpConfig pumps(const PumpVector& powers_dbm) const {
    PumpConfig p;
    p.freqs_thz = pump_freqs_thz;
    p.powers_dbm = powers_dbm;
    return p;
  }

  PumpBounds experimental_bounds() const {
    PumpBounds b;
    b.lower.fill(pump_min_dbm);
    b.upper = pump_max_dbm;
    return b;
  }

  void validate() const {
    fiber.validate();
    PumpConfig p = pumps(PumpVector{0, 0, 0, 0});
    PumpVector loose;
    loose.fill(1e3);  // frequency/ordering checks only
    p.validate(loose);
    if (!(pump_min_dbm <= pump_max_dbm[0]))
      throw std::invalid_argument("SimulationSetup: pump min above max");
  }
};

}  // namespace raman
