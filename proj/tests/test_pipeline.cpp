#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "raman/dataset.hpp"
#include "raman/errors.hpp"
#include "raman/pipeline.hpp"
#include "raman/rng.hpp"

using namespace raman;
namespace fs = std::filesystem;

namespace {

// Independent oracle: per-window quadratic least squares via the explicit
// 3x3 normal equations solved with Cramer's rule.
double ls_fit_oracle(const std::vector<double>& y, int first, int last,
                     int at) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (int i = first; i <= last; ++i) {
    const double x = i - at;
    s0 += 1;
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    t0 += y[i];
    t1 += x * y[i];
    t2 += x * x * y[i];
  }
  const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                     s2 * (s1 * s3 - s2 * s2);
  const double det0 = t0 * (s2 * s4 - s3 * s3) - s1 * (t1 * s4 - s3 * t2) +
                      s2 * (t1 * s3 - s2 * t2);
  return det0 / det;  // constant term = value at x = 0
}

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

FineProfile tiny_fine_profile(const SimulationSetup& setup, int n_nodes,
                              const PumpVector& pumps) {
  return propagate_fine(setup.pumps(pumps), setup.fiber, setup.fgrid, n_nodes);
}

}  // namespace

TEST_CASE("otdr trace geometry") {
  CHECK(otdr_trace_samples(50.0) == 6099);
  const SimulationSetup setup{};
  const FineProfile fine = tiny_fine_profile(setup, otdr_trace_samples(50.0),
                                             {10.0, 10.0, 10.0, 10.0});
  const auto traces = otdr_emulate(fine, 0.0, 1);
  CHECK(traces.size() == 44);
  CHECK(traces[0].samples_dbm.size() == 6099);
  CHECK(traces[0].spacing_m == doctest::Approx(50000.0 / 6098));
  // covers [0, 50 km]
  CHECK((traces[0].samples_dbm.size() - 1) * traces[0].spacing_m ==
        doctest::Approx(50000.0));
}

TEST_CASE("otdr noise behavior") {
  const SimulationSetup setup{};
  const FineProfile fine =
      tiny_fine_profile(setup, 2001, {12.0, 11.0, 10.0, 9.0});

  SUBCASE("sigma 0 reproduces the truth exactly") {
    const auto traces = otdr_emulate(fine, 0.0, 99);
    for (int c = 0; c < 44; ++c)
      for (int i = 0; i < 2001; ++i)
        CHECK(traces[c].samples_dbm[i] == fine.signal_dbm.at(c, i));
  }

  SUBCASE("same seed, same traces") {
    const auto a = otdr_emulate(fine, 0.1, 1234);
    const auto b = otdr_emulate(fine, 0.1, 1234);
    for (int c = 0; c < 44; ++c)
      CHECK(a[c].samples_dbm == b[c].samples_dbm);
    const auto d = otdr_emulate(fine, 0.1, 1235);
    CHECK(a[0].samples_dbm != d[0].samples_dbm);
  }

  SUBCASE("noise std matches sigma") {
    const auto traces = otdr_emulate(fine, 0.1, 42);
    double ss = 0;
    std::size_t n = 0;
    for (int c = 0; c < 44; ++c)
      for (int i = 0; i < 2001; ++i) {
        const double d = traces[c].samples_dbm[i] - fine.signal_dbm.at(c, i);
        ss += d * d;
        ++n;
      }
    const double sd = std::sqrt(ss / (n - 1));
    CHECK(sd > 0.08);
    CHECK(sd < 0.12);
  }

  SUBCASE("negative sigma rejected") {
    CHECK_THROWS_AS(otdr_emulate(fine, -0.1, 0), std::invalid_argument);
  }
}

TEST_CASE("savgol reproduces low-degree polynomials") {
  SmootherSpec spec;  // w = 19, n = 2
  const int n = 200;

  SUBCASE("constant unchanged") {
    std::vector<double> y(n, -17.25);
    const auto s = savgol_smooth(y, spec);
    for (double v : s) CHECK(v == doctest::Approx(-17.25).epsilon(1e-12));
  }

  SUBCASE("exact quadratic reproduced everywhere including edges") {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i)
      y[i] = 0.5 - 0.03 * i + 2.5e-4 * i * i;
    const auto s = savgol_smooth(y, spec);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(s[i] - y[i]) < 1e-9);
  }

  SUBCASE("noise suppression on a smooth trace") {
    Rng rng(7);
    std::vector<double> y(n), truth(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = -16.0 - 0.002 * i;
      y[i] = truth[i] + 0.1 * rng.normal();
    }
    const auto s = savgol_smooth(y, spec);
    double raw = 0, smooth = 0;
    for (int i = 0; i < n; ++i) {
      raw += (y[i] - truth[i]) * (y[i] - truth[i]);
      smooth += (s[i] - truth[i]) * (s[i] - truth[i]);
    }
    CHECK(smooth < raw / 2);
  }
}

TEST_CASE("savgol matches the independent least-squares oracle") {
  SmootherSpec spec;
  const int n = 61;

  SUBCASE("impulse response, interior and edges") {
    for (int impulse_at : {0, 3, 9, 17, 30, 52, 60}) {
      std::vector<double> y(n, 0.0);
      y[impulse_at] = 1.0;
      const auto s = savgol_smooth(y, spec);
      for (int i = 0; i < n; ++i) {
        const int first = std::max(0, i - 9), last = std::min(n - 1, i + 9);
        CHECK(std::abs(s[i] - ls_fit_oracle(y, first, last, i)) < 1e-12);
      }
    }
  }

  SUBCASE("random trace") {
    Rng rng(11);
    std::vector<double> y(n);
    for (double& v : y) v = rng.uniform(-25.0, -10.0);
    const auto s = savgol_smooth(y, spec);
    for (int i = 0; i < n; ++i) {
      const int first = std::max(0, i - 9), last = std::min(n - 1, i + 9);
      CHECK(std::abs(s[i] - ls_fit_oracle(y, first, last, i)) < 1e-10);
    }
  }
}

TEST_CASE("savgol validation") {
  SmootherSpec spec;
  CHECK_THROWS_AS(savgol_smooth(std::vector<double>(10, 0.0), spec),
                  std::invalid_argument);
  SmootherSpec even{18, 2};
  CHECK_THROWS_AS(savgol_smooth(std::vector<double>(30, 0.0), even),
                  std::invalid_argument);
  SmootherSpec bad_order{19, 19};
  CHECK_THROWS_AS(savgol_smooth(std::vector<double>(30, 0.0), bad_order),
                  std::invalid_argument);
}

TEST_CASE("downsample") {
  DistanceGrid dg;

  SUBCASE("identity on the target grid") {
    RawTrace t;
    t.spacing_m = 500.0;
    t.samples_dbm.resize(101);
    Rng rng(5);
    for (double& v : t.samples_dbm) v = rng.uniform(-30.0, -10.0);
    const auto out = downsample(t, dg);
    for (int k = 0; k < 100; ++k)
      CHECK(out[k] == doctest::Approx(t.samples_dbm[k + 1]).epsilon(1e-12));
  }

  SUBCASE("affine traces are exact") {
    RawTrace t;
    t.spacing_m = 8.2;
    const int n = 6200;
    t.samples_dbm.resize(n);
    for (int i = 0; i < n; ++i) t.samples_dbm[i] = -16.0 - 0.0002 * (i * 8.2);
    const auto out = downsample(t, dg);
    for (int k = 0; k < 100; ++k) {
      const double z_m = dg.point(k) * 1000.0;
      CHECK(out[k] == doctest::Approx(-16.0 - 0.0002 * z_m).epsilon(1e-10));
    }
  }

  SUBCASE("quadratic trace error stays below 1e-3 dB") {
    RawTrace t;
    t.spacing_m = 8.2;
    const int n = 6200;
    t.samples_dbm.resize(n);
    auto f = [](double z_km) { return -16.0 - 0.2 * z_km + 0.004 * z_km * z_km; };
    for (int i = 0; i < n; ++i) t.samples_dbm[i] = f(i * 8.2 / 1000.0);
    const auto out = downsample(t, dg);
    for (int k = 0; k < 100; ++k)
      CHECK(std::abs(out[k] - f(dg.point(k))) < 1e-3);
  }

  SUBCASE("points outside the trace are rejected") {
    RawTrace t;
    t.spacing_m = 500.0;
    t.samples_dbm.resize(50);  // covers only 24.5 km
    CHECK_THROWS_AS(downsample(t, dg), std::invalid_argument);
  }
}

TEST_CASE("noiseless pipeline matches the direct simulator") {
  SimulationSetup setup;
  const PumpVector pumps{18.0, 15.0, 12.0, 16.0};
  const PowerProfile2D direct =
      propagate(setup.pumps(pumps), setup.fiber, setup.fgrid, setup.dgrid,
                setup.prop);
  const PowerProfile2D piped = measure_profile(setup.pumps(pumps), setup, 0.0, 1);
  double worst = 0;
  for (std::size_t i = 0; i < direct.values.data.size(); ++i)
    worst = std::max(worst,
                     std::abs(direct.values.data[i] - piped.values.data[i]));
  CHECK(worst < 1e-3);
}

TEST_CASE("gen_dataset determinism and bounds") {
  SimulationSetup setup;
  PumpBounds bounds = setup.experimental_bounds();

  const Dataset a = gen_dataset(6, bounds, 77, 0.05, setup, true);
  const Dataset b = gen_dataset(6, bounds, 77, 0.05, setup, false);  // serial
  REQUIRE(a.records.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(a.records[i].pumps_dbm == b.records[i].pumps_dbm);
    CHECK(a.records[i].profile_dbm == b.records[i].profile_dbm);
    for (int j = 0; j < kNumPumps; ++j) {
      CHECK(a.records[i].pumps_dbm[j] >= bounds.lower[j]);
      CHECK(a.records[i].pumps_dbm[j] <= bounds.upper[j]);
    }
  }

  // same seed -> byte-identical file
  const auto p1 = temp_file("rds_same_seed_1.rds");
  const auto p2 = temp_file("rds_same_seed_2.rds");
  dataset_save(a, p1.string());
  dataset_save(gen_dataset(6, bounds, 77, 0.05, setup), p2.string());
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string c1((std::istreambuf_iterator<char>(f1)), {});
  const std::string c2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(c1 == c2);
  CHECK_THROWS_AS(gen_dataset(0, bounds, 1, 0.0, setup), std::invalid_argument);
}

TEST_CASE("dataset round trip and corruption handling") {
  SimulationSetup setup;
  const Dataset ds = gen_dataset(10, setup.experimental_bounds(), 5, 0.02, setup);
  const auto path = temp_file("rds_roundtrip.rds");
  dataset_save(ds, path.string());

  SUBCASE("save-load-save is lossless") {
    const Dataset loaded = dataset_load(path.string());
    REQUIRE(loaded.records.size() == ds.records.size());
    CHECK(loaded.fgrid == ds.fgrid);
    CHECK(loaded.dgrid == ds.dgrid);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      CHECK(loaded.records[i].pumps_dbm == ds.records[i].pumps_dbm);
      CHECK(loaded.records[i].profile_dbm == ds.records[i].profile_dbm);
    }
    const auto path2 = temp_file("rds_roundtrip2.rds");
    dataset_save(loaded, path2.string());
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string c1((std::istreambuf_iterator<char>(f1)), {});
    const std::string c2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(c1 == c2);
  }

  SUBCASE("corrupted magic is rejected") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    bytes[0] = 'X';
    const auto bad = temp_file("rds_bad_magic.rds");
    std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(dataset_load(bad.string()), FormatError);
  }

  SUBCASE("truncation is rejected") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    bytes.resize(bytes.size() - 100);
    const auto bad = temp_file("rds_truncated.rds");
    std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(dataset_load(bad.string()), FormatError);
  }

  SUBCASE("trailing garbage is rejected") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    bytes += "junk";
    const auto bad = temp_file("rds_trailing.rds");
    std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(dataset_load(bad.string()), FormatError);
  }

  SUBCASE("missing file raises IoError") {
    CHECK_THROWS_AS(dataset_load("/nonexistent/x.rds"), IoError);
  }
}
