#include "raman/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "raman/errors.hpp"

namespace raman {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& key, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw ConfigError("config line " + std::to_string(line) + ": value '" +
                      value + "' for key '" + key + "' is not a number");
  return v;
}

std::array<double, 4> parse_quad(const std::string& value,
                                 const std::string& key, int line) {
  std::array<double, 4> out{};
  std::stringstream ss(value);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n >= 4) ++n;  // overflow detected below
    else out[n++] = parse_double(trim(item), key, line);
  }
  if (n != 4)
    throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                      "' needs exactly 4 comma-separated values");
  return out;
}

}  // namespace

SimulationSetup parse_setup(const std::string& text, const std::string& origin) {
  SimulationSetup s;
  double grid_f0 = kBandLowThz;
  double span_km = 50.0;

  std::stringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + " line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + trim(raw) + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw ConfigError(origin + " line " + std::to_string(line_no) +
                        ": empty value for key '" + key + "'");

    if (key == "fiber.length_km") {
      span_km = parse_double(value, key, line_no);
      s.fiber.length_km = span_km;
    } else if (key == "fiber.alpha_signal_db_km") {
      s.fiber.alpha_signal_db_km = parse_double(value, key, line_no);
    } else if (key == "fiber.alpha_pump_db_km") {
      s.fiber.alpha_pump_db_km = parse_double(value, key, line_no);
    } else if (key == "fiber.raman_peak_efficiency") {
      s.fiber.raman_peak_efficiency = parse_double(value, key, line_no);
    } else if (key == "fiber.raman_peak_shift_thz") {
      s.fiber.raman_peak_shift_thz = parse_double(value, key, line_no);
    } else if (key == "fiber.launch_power_dbm") {
      s.fiber.launch_power_dbm = parse_double(value, key, line_no);
    } else if (key == "pump.frequencies_thz") {
      s.pump_freqs_thz = parse_quad(value, key, line_no);
    } else if (key == "pump.max_powers_dbm") {
      s.pump_max_dbm = parse_quad(value, key, line_no);
    } else if (key == "pump.min_power_dbm") {
      s.pump_min_dbm = parse_double(value, key, line_no);
    } else if (key == "grid.first_freq_thz") {
      grid_f0 = parse_double(value, key, line_no);
    } else if (key == "sim.step_km") {
      s.prop.step_km = parse_double(value, key, line_no);
    } else if (key == "otdr.noise_sigma_db") {
      s.otdr_noise_sigma_db = parse_double(value, key, line_no);
    } else {
      throw ConfigError(origin + " line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }

  try {
    s.fgrid = FrequencyGrid(grid_f0);
    s.dgrid = DistanceGrid(span_km);
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return s;
}

SimulationSetup load_setup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_setup: cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_setup(ss.str(), path);
}

std::string serialize_setup(const SimulationSetup& s) {
  char buf[1024];
  std::snprintf(
      buf, sizeof buf,
      "fiber.length_km = %.9g\n"
      "fiber.alpha_signal_db_km = %.9g\n"
      "fiber.alpha_pump_db_km = %.9g\n"
      "fiber.raman_peak_efficiency = %.12g\n"
      "fiber.raman_peak_shift_thz = %.9g\n"
      "fiber.launch_power_dbm = %.9g\n"
      "pump.frequencies_thz = %.9g, %.9g, %.9g, %.9g\n"
      "pump.max_powers_dbm = %.9g, %.9g, %.9g, %.9g\n"
      "pump.min_power_dbm = %.9g\n"
      "grid.first_freq_thz = %.9g\n"
      "sim.step_km = %.9g\n"
      "otdr.noise_sigma_db = %.9g\n",
      s.fiber.length_km, s.fiber.alpha_signal_db_km, s.fiber.alpha_pump_db_km,
      s.fiber.raman_peak_efficiency, s.fiber.raman_peak_shift_thz,
      s.fiber.launch_power_dbm, s.pump_freqs_thz[0], s.pump_freqs_thz[1],
      s.pump_freqs_thz[2], s.pump_freqs_thz[3], s.pump_max_dbm[0],
      s.pump_max_dbm[1], s.pump_max_dbm[2], s.pump_max_dbm[3], s.pump_min_dbm,
      s.fgrid.first(), s.prop.step_km, s.otdr_noise_sigma_db);
  return buf;
}

std::string setup_hash(const SimulationSetup& setup) {
  const std::string text = serialize_setup(setup);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[19];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace raman
