#include "raman/propagate.hpp"

#include <cmath>
#include <string>

#include "raman/errors.hpp"
#include "raman/parallel.hpp"
#include "raman/raman_gain.hpp"

namespace raman {

namespace {

// Pairwise coupling matrix for co-propagating waves, per mW of the driving
// wave. Entry (i, j): rate wave j imposes on wave i. A higher-frequency j
// amplifies i; a lower-frequency j depletes i with the photon-energy ratio
// f_i / f_j.
Matrix coupling_matrix(const std::vector<double>& freqs_thz,
                       double peak_efficiency, double peak_shift_thz) {
  const std::size_t n = freqs_thz.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double df = freqs_thz[j] - freqs_thz[i];
      if (df > 0.0) {
        m.at(i, j) = raman_gain_efficiency(df, peak_efficiency, peak_shift_thz);
      } else if (df < 0.0) {
        m.at(i, j) = -raman_gain_efficiency(-df, peak_efficiency,
                                            peak_shift_thz) *
                     (freqs_thz[i] / freqs_thz[j]);
      }
    }
  }
  for (double& v : m.data) v *= 1e-3;  // per mW
  return m;
}

void check_finite(const std::vector<double>& p, double step_km, double x_km) {
  for (double v : p)
    if (!std::isfinite(v))
      throw NumericError(
          "propagate: non-finite power at x = " + std::to_string(x_km) +
          " km with RK4 step " + std::to_string(step_km) +
          " km; reduce the step or the pump powers");
}

// dP_i/dx = -alpha_i P_i + P_i sum_j M(i,j) P_j
void coupled_rhs(const Matrix& m, const std::vector<double>& alpha_lin,
                 const std::vector<double>& p, std::vector<double>& dp) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    double rate = -alpha_lin[i];
    const double* mi = m.row(i);
    for (std::size_t j = 0; j < n; ++j) rate += mi[j] * p[j];
    dp[i] = rate * p[i];
  }
}

// Single signal channel through a frozen pump field. The pump field is
// tabulated at half the signal step, so RK4 midpoints land on pump nodes.
// pump_node(m) holds sum_j w_j * Q_j at z = m * step/2 already folded into
// a per-channel gain table.
void integrate_channel(double alpha_lin, const std::vector<double>& gain_nodes,
                       double step_km, int n_steps, double launch_mw,
                       double* out_nodes) {
  double p = launch_mw;
  out_nodes[0] = p;
  const double h = step_km;
  for (int i = 0; i < n_steps; ++i) {
    const double a0 = -alpha_lin + gain_nodes[2 * i];
    const double am = -alpha_lin + gain_nodes[2 * i + 1];
    const double a1 = -alpha_lin + gain_nodes[2 * i + 2];
    const double k1 = a0 * p;
    const double k2 = am * (p + 0.5 * h * k1);
    const double k3 = am * (p + 0.5 * h * k2);
    const double k4 = a1 * (p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    out_nodes[i + 1] = p;
    if (!std::isfinite(p))
      throw NumericError("propagate: non-finite signal power at z = " +
                         std::to_string((i + 1) * h) + " km with RK4 step " +
                         std::to_string(h) + " km");
  }
}

struct PumpField {
  // Powers in mW at nodes spaced step/2 apart in the pump travel direction
  // (distance from z = L). Row j = pump j, 2*n_steps+1 nodes.
  Matrix nodes;
  int n_steps = 0;  // signal-pass step count
};

// Backward pump pass as an IVP in the pump frame: the four pumps co-propagate
// away from their z = L launch and see only each other.
PumpField solve_pump_field(const PumpConfig& pumps, const FiberParams& fiber,
                           double step_km, int n_steps) {
  std::vector<double> freqs(pumps.freqs_thz.begin(), pumps.freqs_thz.end());
  std::vector<double> alpha(kNumPumps, fiber.alpha_pump_db_km);
  std::vector<double> launch(kNumPumps);
  for (int j = 0; j < kNumPumps; ++j) launch[j] = dbm_to_mw(pumps.powers_dbm[j]);

  PumpField field;
  field.n_steps = n_steps;
  field.nodes =
      integrate_copropagating(freqs, alpha, launch, fiber.raman_peak_efficiency,
                              fiber.raman_peak_shift_thz, fiber.length_km,
                              2 * n_steps);
  return field;
}

// Per-channel Raman gain rate (1/km) at every pump half-step node, indexed so
// that gain_nodes[m] corresponds to z = m * step/2.
std::vector<double> channel_gain_nodes(const PumpField& field,
                                       const PumpConfig& pumps,
                                       const FiberParams& fiber,
                                       double channel_freq_thz) {
  const int n_half = 2 * field.n_steps;
  std::array<double, kNumPumps> w{};
  for (int j = 0; j < kNumPumps; ++j)
    w[j] = raman_gain_efficiency(pumps.freqs_thz[j] - channel_freq_thz,
                                 fiber.raman_peak_efficiency,
                                 fiber.raman_peak_shift_thz) *
           1e-3;  // per mW

  std::vector<double> gain(n_half + 1, 0.0);
  for (int m = 0; m <= n_half; ++m) {
    // pump node m is at distance m*step/2 from z = L, i.e. z-node n_half - m
    double g = 0.0;
    for (int j = 0; j < kNumPumps; ++j)
      g += w[j] * field.nodes.at(j, n_half - m);
    gain[m] = g;
  }
  return gain;
}

int checked_step_count(double length_km, double step_km) {
  if (!(step_km > 0))
    throw std::invalid_argument("propagate: step must be > 0 km");
  const long long n = std::llround(length_km / step_km);
  if (n < 1 || std::abs(n * step_km - length_km) > 1e-9 * std::max(1.0, length_km))
    throw std::invalid_argument("propagate: step " + std::to_string(step_km) +
                                " km does not divide the span length");
  return static_cast<int>(n);
}

}  // namespace

Matrix integrate_copropagating(const std::vector<double>& freqs_thz,
                               const std::vector<double>& alpha_db_km,
                               const std::vector<double>& launch_mw,
                               double peak_efficiency, double peak_shift_thz,
                               double length_km, int n_steps) {
  const std::size_t n = freqs_thz.size();
  if (alpha_db_km.size() != n || launch_mw.size() != n)
    throw std::invalid_argument("integrate_copropagating: size mismatch");
  if (n_steps < 1)
    throw std::invalid_argument("integrate_copropagating: need >= 1 step");

  const Matrix m = coupling_matrix(freqs_thz, peak_efficiency, peak_shift_thz);
  std::vector<double> alpha(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha_db_km[i] < 0)
      throw std::invalid_argument("integrate_copropagating: alpha < 0");
    alpha[i] = db_per_km_to_linear(alpha_db_km[i]);
  }

  const double h = length_km / n_steps;
  Matrix out(n, n_steps + 1);
  std::vector<double> p = launch_mw;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) out.at(i, 0) = p[i];

  for (int s = 0; s < n_steps; ++s) {
    coupled_rhs(m, alpha, p, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    coupled_rhs(m, alpha, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    coupled_rhs(m, alpha, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    coupled_rhs(m, alpha, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      p[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    check_finite(p, h, (s + 1) * h);
    for (std::size_t i = 0; i < n; ++i) out.at(i, s + 1) = p[i];
  }
  return out;
}

FineProfile propagate_fine(const PumpConfig& pumps, const FiberParams& fiber,
                           const FrequencyGrid& fgrid, int n_nodes,
                           bool parallel) {
  fiber.validate();
  if (n_nodes < 2)
    throw std::invalid_argument("propagate_fine: need >= 2 nodes");

  const int n_steps = n_nodes - 1;
  const double h = fiber.length_km / n_steps;
  const PumpField field = solve_pump_field(pumps, fiber, h, n_steps);
  const double launch = dbm_to_mw(fiber.launch_power_dbm);
  const double alpha_s = db_per_km_to_linear(fiber.alpha_signal_db_km);

  FineProfile fine;
  fine.dz_km = h;
  fine.signal_dbm = Matrix(kNumChannels, n_nodes);

  auto run_channel = [&](int c) {
    const std::vector<double> gain =
        channel_gain_nodes(field, pumps, fiber, fgrid.freq(c));
    std::vector<double> nodes(n_nodes);
    integrate_channel(alpha_s, gain, h, n_steps, launch, nodes.data());
    double* row = fine.signal_dbm.row(c);
    for (int i = 0; i < n_nodes; ++i) row[i] = mw_to_dbm(nodes[i]);
  };

  if (parallel) {
    parallel_for(kNumChannels, run_channel);
  } else {
    for (int c = 0; c < kNumChannels; ++c) run_channel(c);
  }
  return fine;
}

PowerProfile2D propagate(const PumpConfig& pumps, const FiberParams& fiber,
                         const FrequencyGrid& fgrid, const DistanceGrid& dgrid,
                         const PropagationOptions& opts) {
  fiber.validate();
  if (std::abs(dgrid.span() - fiber.length_km) > 1e-9)
    throw std::invalid_argument("propagate: distance grid span != fiber length");

  const int n_steps = checked_step_count(fiber.length_km, opts.step_km);
  const FineProfile fine =
      propagate_fine(pumps, fiber, fgrid, n_steps + 1, opts.parallel);

  // Grid points must land on RK4 nodes.
  std::array<int, kNumDistancePoints> idx{};
  for (int k = 0; k < dgrid.size(); ++k) {
    const double z = dgrid.point(k);
    const long long i = std::llround(z / opts.step_km);
    if (std::abs(i * opts.step_km - z) > 1e-9)
      throw std::invalid_argument(
          "propagate: step " + std::to_string(opts.step_km) +
          " km does not hit distance-grid point z = " + std::to_string(z));
    idx[k] = static_cast<int>(i);
  }

  PowerProfile2D prof(fgrid, dgrid);
  for (int c = 0; c < kNumChannels; ++c)
    for (int k = 0; k < dgrid.size(); ++k)
      prof.at(c, k) = fine.signal_dbm.at(c, idx[k]);
  return prof;
}

GainSpectrum on_off_gain(const PowerProfile2D& on, const PowerProfile2D& off) {
  on.require_same_grids(off, "on_off_gain");
  GainSpectrum g;
  const int last = kNumDistancePoints - 1;
  for (int c = 0; c < kNumChannels; ++c)
    g.values_db[c] = on.at(c, last) - off.at(c, last);
  return g;
}

double calibrate_peak_efficiency(const FiberParams& fiber,
                                 const PumpConfig& pumps_at_max,
                                 const FrequencyGrid& fgrid,
                                 const DistanceGrid& dgrid,
                                 double target_gain_db,
                                 const PropagationOptions& opts) {
  auto max_gain = [&](double peak_eff) {
    FiberParams f = fiber;
    f.raman_peak_efficiency = peak_eff;
    const PowerProfile2D on = propagate(pumps_at_max, f, fgrid, dgrid, opts);
    const PowerProfile2D off =
        propagate(pumps_at_max.off(), f, fgrid, dgrid, opts);
    const GainSpectrum g = on_off_gain(on, off);
    double m = g.values_db[0];
    for (double v : g.values_db) m = std::max(m, v);
    return m;
  };

  double lo = 1e-3, hi = 3.0;
  if (max_gain(lo) > target_gain_db || max_gain(hi) < target_gain_db)
    throw NumericError(
        "calibrate_peak_efficiency: target gain not bracketed in [1e-3, 3]");
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (max_gain(mid) < target_gain_db ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace raman
