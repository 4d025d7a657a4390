#include "raman/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "raman/errors.hpp"
#include "raman/parallel.hpp"
#include "raman/rng.hpp"

namespace raman {

namespace {

constexpr char kMagic[4] = {'R', 'D', 'S', '1'};
constexpr std::uint16_t kVersion = 1;

// Explicit little-endian primitives so the on-disk layout is host-independent.
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}
void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  const char* what;

  void need(std::size_t n) {
    if (pos + n > buf.size())
      throw FormatError(std::string(what) + ": truncated file (needed " +
                        std::to_string(n) + " bytes at offset " +
                        std::to_string(pos) + ")");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint8_t>(buf[pos]) |
                      (static_cast<std::uint8_t>(buf[pos + 1]) << 8);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string(what) + ": cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  return buf;
}

void write_file(const std::string& path, const std::string& buf,
                const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(std::string(what) + ": cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(std::string(what) + ": write failed for " + path);
}

}  // namespace

PowerProfile2D Dataset::profile(std::size_t idx) const {
  PowerProfile2D p(fgrid, dgrid);
  const DatasetRecord& r = records.at(idx);
  for (std::size_t i = 0; i < r.profile_dbm.size(); ++i)
    p.values.data[i] = r.profile_dbm[i];
  return p;
}

Dataset gen_dataset(int n, const PumpBounds& bounds, std::uint64_t seed,
                    double noise_sigma_db, const SimulationSetup& setup,
                    bool parallel) {
  if (n <= 0) throw std::invalid_argument("gen_dataset: n must be > 0");
  bounds.validate();
  if (noise_sigma_db < 0)
    throw std::invalid_argument("gen_dataset: noise sigma must be >= 0");

  Dataset ds;
  ds.fgrid = setup.fgrid;
  ds.dgrid = setup.dgrid;
  ds.seed = seed;
  ds.records.resize(n);

  auto make_record = [&](int r) {
    const std::uint64_t rec_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    Rng rng(rec_seed);
    PumpVector pumps;
    for (int j = 0; j < kNumPumps; ++j)
      pumps[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);

    PowerProfile2D prof;
    try {
      prof = measure_profile(setup.pumps(pumps), setup, noise_sigma_db,
                             derive_seed(rec_seed, 0x7261776eULL));
    } catch (const NumericError& e) {
      char msg[256];
      std::snprintf(msg, sizeof msg,
                    "gen_dataset: record %d failed for pumps [%.3f %.3f %.3f "
                    "%.3f] dBm: %s",
                    r, pumps[0], pumps[1], pumps[2], pumps[3], e.what());
      throw NumericError(msg);
    }

    DatasetRecord& rec = ds.records[r];
    for (int j = 0; j < kNumPumps; ++j)
      rec.pumps_dbm[j] = static_cast<float>(pumps[j]);
    rec.profile_dbm.resize(prof.values.data.size());
    for (std::size_t i = 0; i < prof.values.data.size(); ++i)
      rec.profile_dbm[i] = static_cast<float>(prof.values.data[i]);
  };

  if (parallel) {
    parallel_for(n, make_record);
  } else {
    for (int r = 0; r < n; ++r) make_record(r);
  }
  return ds;
}

void dataset_save(const Dataset& ds, const std::string& path) {
  std::string buf;
  buf.reserve(18 + 48 + ds.records.size() * (4 + 4400) * 4);
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(ds.records.size()));
  put_f64(buf, kNumChannels);
  put_f64(buf, kNumDistancePoints);
  put_f64(buf, ds.fgrid.first());
  put_f64(buf, ds.fgrid.spacing());
  put_f64(buf, ds.dgrid.point(0));
  put_f64(buf, ds.dgrid.spacing());
  for (const DatasetRecord& r : ds.records) {
    if (r.profile_dbm.size() != kNumChannels * kNumDistancePoints)
      throw std::invalid_argument("dataset_save: record has wrong profile size");
    for (float p : r.pumps_dbm) put_f32(buf, p);
    for (float v : r.profile_dbm) put_f32(buf, v);
  }
  write_file(path, buf, "dataset_save");
}

Dataset dataset_load(const std::string& path) {
  const std::string buf = read_file(path, "dataset_load");
  Reader rd{buf, 0, "dataset_load"};

  rd.need(4);
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw FormatError("dataset_load: bad magic (expected RDS1) in " + path);
  rd.pos = 4;
  const std::uint16_t version = rd.u16();
  if (version != kVersion)
    throw FormatError("dataset_load: unsupported version " +
                      std::to_string(version));
  const std::uint32_t count = rd.u32();
  const double n_ch = rd.f64();
  const double n_z = rd.f64();
  const double f0 = rd.f64();
  const double df = rd.f64();
  const double z0 = rd.f64();
  const double dz = rd.f64();
  if (n_ch != kNumChannels || n_z != kNumDistancePoints)
    throw FormatError("dataset_load: grid descriptor says " +
                      std::to_string(n_ch) + "x" + std::to_string(n_z) +
                      ", expected 44x100");
  if (std::abs(df - kChannelSpacingThz) > 1e-9)
    throw FormatError("dataset_load: unexpected channel spacing");

  Dataset ds;
  ds.fgrid = FrequencyGrid(f0);
  ds.dgrid = DistanceGrid(dz * kNumDistancePoints);
  if (std::abs(ds.dgrid.point(0) - z0) > 1e-9)
    throw FormatError("dataset_load: inconsistent distance grid descriptor");

  ds.records.resize(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    DatasetRecord& rec = ds.records[r];
    for (int j = 0; j < kNumPumps; ++j) rec.pumps_dbm[j] = rd.f32();
    rec.profile_dbm.resize(kNumChannels * kNumDistancePoints);
    for (float& v : rec.profile_dbm) v = rd.f32();
  }
  if (rd.pos != buf.size())
    throw FormatError("dataset_load: " + std::to_string(buf.size() - rd.pos) +
                      " trailing bytes after " + std::to_string(count) +
                      " records");
  return ds;
}

void dataset_export_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dataset_export_csv: cannot open " + path);
  out << "p1_dbm,p2_dbm,p3_dbm,p4_dbm";
  for (int c = 0; c < kNumChannels; ++c)
    for (int k = 0; k < kNumDistancePoints; ++k)
      out << ",P_f" << c << "_z" << k;
  out << "\n";
  char num[48];
  for (const DatasetRecord& r : ds.records) {
    for (int j = 0; j < kNumPumps; ++j) {
      std::snprintf(num, sizeof num, j ? ",%.9g" : "%.9g",
                    static_cast<double>(r.pumps_dbm[j]));
      out << num;
    }
    for (float v : r.profile_dbm) {
      std::snprintf(num, sizeof num, ",%.9g", static_cast<double>(v));
      out << num;
    }
    out << "\n";
  }
  if (!out) throw IoError("dataset_export_csv: write failed for " + path);
}

}  // namespace raman
