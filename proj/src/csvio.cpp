#include "raman/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "raman/errors.hpp"

namespace raman {

void profile_save_csv(const PowerProfile2D& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("profile_save_csv: cannot open " + path);
  char num[48];
  out << "freq_thz\\dist_km";
  for (int k = 0; k < p.dgrid.size(); ++k) {
    std::snprintf(num, sizeof num, ",%.6g", p.dgrid.point(k));
    out << num;
  }
  out << "\n";
  for (int c = 0; c < p.fgrid.size(); ++c) {
    std::snprintf(num, sizeof num, "%.6g", p.fgrid.freq(c));
    out << num;
    for (int k = 0; k < p.dgrid.size(); ++k) {
      std::snprintf(num, sizeof num, ",%.9g", p.at(c, k));
      out << num;
    }
    out << "\n";
  }
  if (!out) throw IoError("profile_save_csv: write failed for " + path);
}

namespace {

std::vector<double> split_numbers(const std::string& line, int line_no,
                                  bool skip_first) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    if (first && skip_first) {
      first = false;
      continue;
    }
    first = false;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw FormatError("profile_load_csv: line " + std::to_string(line_no) +
                        ": '" + item + "' is not a number");
    }
  }
  return out;
}

}  // namespace

PowerProfile2D profile_load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("profile_load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw FormatError("profile_load_csv: empty file " + path);
  const std::vector<double> dists = split_numbers(line, 1, true);
  if (static_cast<int>(dists.size()) != kNumDistancePoints)
    throw FormatError("profile_load_csv: header has " +
                      std::to_string(dists.size()) +
                      " distances, expected 100");

  std::vector<double> freqs;
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> vals = split_numbers(line, line_no, false);
    if (static_cast<int>(vals.size()) != kNumDistancePoints + 1)
      throw FormatError("profile_load_csv: line " + std::to_string(line_no) +
                        " has " + std::to_string(vals.size()) +
                        " fields, expected 101");
    freqs.push_back(vals[0]);
    vals.erase(vals.begin());
    rows.push_back(std::move(vals));
  }
  if (static_cast<int>(rows.size()) != kNumChannels)
    throw FormatError("profile_load_csv: " + std::to_string(rows.size()) +
                      " channel rows, expected 44");

  PowerProfile2D p(FrequencyGrid(freqs[0]),
                   DistanceGrid(dists.back()));
  for (int c = 0; c < kNumChannels; ++c) {
    if (std::abs(freqs[c] - p.fgrid.freq(c)) > 1e-6)
      throw FormatError("profile_load_csv: channel frequency " +
                        std::to_string(freqs[c]) +
                        " is off the canonical 0.1 THz comb");
    for (int k = 0; k < kNumDistancePoints; ++k) p.at(c, k) = rows[c][k];
  }
  for (int k = 0; k < kNumDistancePoints; ++k)
    if (std::abs(dists[k] - p.dgrid.point(k)) > 1e-6)
      throw FormatError("profile_load_csv: distance header is off the "
                        "canonical 0.5 km grid");
  return p;
}

}  // namespace raman
