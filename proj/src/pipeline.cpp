#include "raman/pipeline.hpp"

#include <cmath>
#include <string>

#include "raman/errors.hpp"
#include "raman/rng.hpp"

namespace raman {

namespace {

// Least-squares polynomial fit over samples y[first..last] with abscissas
// (index - eval_index), evaluated at the eval point itself (x = 0), i.e. the
// fitted constant term. Solved via the (order+1)^2 normal equations.
double fit_eval(const std::vector<double>& y, int first, int last,
                int eval_index, int order) {
  const int dim = order + 1;
  // moments s_k = sum x^k, rhs_k = sum x^k y
  std::vector<double> s(2 * order + 1, 0.0), rhs(dim, 0.0);
  for (int i = first; i <= last; ++i) {
    const double x = i - eval_index;
    double xp = 1.0;
    for (int k = 0; k <= 2 * order; ++k) {
      s[k] += xp;
      if (k < dim) rhs[k] += xp * y[i];
      xp *= x;
    }
  }
  std::vector<double> a(dim * dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a[r * dim + c] = s[r + c];
  // Gaussian elimination with partial pivoting
  std::vector<double> b = rhs;
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(a[r * dim + col]) > std::abs(a[piv * dim + col])) piv = r;
    for (int c = 0; c < dim; ++c) std::swap(a[col * dim + c], a[piv * dim + c]);
    std::swap(b[col], b[piv]);
    const double d = a[col * dim + col];
    for (int r = col + 1; r < dim; ++r) {
      const double f = a[r * dim + col] / d;
      for (int c = col; c < dim; ++c) a[r * dim + c] -= f * a[col * dim + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    double v = b[r];
    for (int c = r + 1; c < dim; ++c) v -= a[r * dim + c] * b[c];
    b[r] = v / a[r * dim + r];
  }
  return b[0];  // polynomial value at x = 0
}

}  // namespace

std::vector<RawTrace> otdr_emulate(const FineProfile& fine,
                                   double noise_sigma_db, std::uint64_t seed) {
  if (noise_sigma_db < 0)
    throw std::invalid_argument("otdr_emulate: noise sigma must be >= 0 dB");

  const int n_nodes = static_cast<int>(fine.signal_dbm.cols);
  std::vector<RawTrace> traces(kNumChannels);
  for (int c = 0; c < kNumChannels; ++c) {
    RawTrace& t = traces[c];
    t.channel_index = c;
    t.spacing_m = fine.dz_km * 1000.0;
    t.samples_dbm.assign(fine.signal_dbm.row(c),
                         fine.signal_dbm.row(c) + n_nodes);
    if (noise_sigma_db > 0) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
      for (double& v : t.samples_dbm) v += noise_sigma_db * rng.normal();
    }
  }
  return traces;
}

std::vector<double> savgol_smooth(const std::vector<double>& samples,
                                  const SmootherSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(samples.size());
  const int half = spec.window / 2;
  if (n < spec.window)
    throw std::invalid_argument("savgol_smooth: trace length " +
                                std::to_string(n) + " shorter than window " +
                                std::to_string(spec.window));

  // Interior points share one set of convolution coefficients: the fitted
  // value at the window center is a fixed linear combination of the samples.
  std::vector<double> center_coeff(spec.window);
  {
    std::vector<double> unit(spec.window, 0.0);
    for (int j = 0; j < spec.window; ++j) {
      unit[j] = 1.0;
      center_coeff[j] = fit_eval(unit, 0, spec.window - 1, half, spec.poly_order);
      unit[j] = 0.0;
    }
  }

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (i >= half && i + half < n) {
      double v = 0.0;
      for (int j = 0; j < spec.window; ++j)
        v += center_coeff[j] * samples[i - half + j];
      out[i] = v;
    } else {
      const int first = std::max(0, i - half);
      const int last = std::min(n - 1, i + half);
      out[i] = fit_eval(samples, first, last, i, spec.poly_order);
    }
  }
  return out;
}

std::vector<double> downsample(const RawTrace& trace,
                               const DistanceGrid& target) {
  const int n = static_cast<int>(trace.samples_dbm.size());
  if (n < 2) throw std::invalid_argument("downsample: trace too short");
  const double spacing_km = trace.spacing_m * 1e-3;
  if (spacing_km > target.spacing() + 1e-12)
    throw std::invalid_argument(
        "downsample: trace spacing exceeds target spacing");
  const double span_km = (n - 1) * spacing_km;

  std::vector<double> out(target.size());
  for (int k = 0; k < target.size(); ++k) {
    const double z = target.point(k);
    if (z < -1e-9 || z > span_km + 1e-9)
      throw std::invalid_argument("downsample: target point " +
                                  std::to_string(z) +
                                  " km outside trace range [0, " +
                                  std::to_string(span_km) + "] km");
    const double u = std::min(z / spacing_km, static_cast<double>(n - 1));
    const int i0 = std::min(static_cast<int>(u), n - 2);
    const double w = u - i0;
    out[k] = (1.0 - w) * trace.samples_dbm[i0] + w * trace.samples_dbm[i0 + 1];
  }
  return out;
}

PowerProfile2D measure_profile(const PumpConfig& pumps,
                               const SimulationSetup& setup,
                               double noise_sigma_db, std::uint64_t seed,
                               const SmootherSpec& smoother) {
  const int n_nodes = otdr_trace_samples(setup.fiber.length_km);
  const FineProfile fine = propagate_fine(pumps, setup.fiber, setup.fgrid,
                                          n_nodes, setup.prop.parallel);
  const std::vector<RawTrace> traces = otdr_emulate(fine, noise_sigma_db, seed);

  PowerProfile2D prof(setup.fgrid, setup.dgrid);
  for (int c = 0; c < kNumChannels; ++c) {
    RawTrace smooth = traces[c];
    smooth.samples_dbm = savgol_smooth(traces[c].samples_dbm, smoother);
    const std::vector<double> vals = downsample(smooth, setup.dgrid);
    for (int k = 0; k < setup.dgrid.size(); ++k) prof.at(c, k) = vals[k];
  }
  return prof;
}

}  // namespace raman
