#include "raman/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "raman/errors.hpp"
#include "raman/parallel.hpp"
#include "raman/rng.hpp"

namespace raman {

namespace {

// Batch gradients reduce over this many fixed sample chunks regardless of
// the worker count, keeping summation order (and results) thread-count
// independent.
constexpr int kGradChunks = 8;

constexpr char kMagic[4] = {'R', 'I', 'N', 'V'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

double normalize_profile_value(double dbm, const Normalization& n) {
  n.require_fitted();
  return (dbm - n.profile_mean) / n.profile_std;
}

double denormalize_profile_value(double x, const Normalization& n) {
  n.require_fitted();
  return x * n.profile_std + n.profile_mean;
}

std::array<double, kNumPumps> normalize_pumps(const PumpVector& p,
                                              const Normalization& n) {
  n.require_fitted();
  std::array<double, kNumPumps> y{};
  for (int j = 0; j < kNumPumps; ++j) {
    const double span = n.pump_max[j] - n.pump_min[j];
    if (!(span > 0))
      throw std::logic_error("normalize_pumps: degenerate pump bounds");
    y[j] = (p[j] - n.pump_min[j]) / span;
  }
  return y;
}

PumpVector denormalize_pumps(const std::array<double, kNumPumps>& y,
                             const Normalization& n) {
  n.require_fitted();
  PumpVector p{};
  for (int j = 0; j < kNumPumps; ++j)
    p[j] = n.pump_min[j] + y[j] * (n.pump_max[j] - n.pump_min[j]);
  return p;
}

Normalization fit_normalization(const Dataset& ds, int n_train,
                                const PumpBounds& global_bounds) {
  if (n_train < 1 || n_train > static_cast<int>(ds.records.size()))
    throw std::invalid_argument("fit_normalization: bad training-split size");
  global_bounds.validate();

  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < n_train; ++r)
    for (float v : ds.records[r].profile_dbm) {
      sum += v;
      sum_sq += static_cast<double>(v) * v;
      ++count;
    }
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;

  Normalization n;
  n.profile_mean = mean;
  n.profile_std = std::sqrt(std::max(var, 1e-12));
  n.pump_min = global_bounds.lower;
  n.pump_max = global_bounds.upper;
  n.fitted = true;
  return n;
}

void InverseModel::validate() const {
  arch.validate();
  norm.require_fitted();
  if (static_cast<std::int64_t>(weights.size()) != nn::weight_count(arch))
    throw FormatError("InverseModel: weight count " +
                      std::to_string(weights.size()) +
                      " does not match the architecture (expected " +
                      std::to_string(nn::weight_count(arch)) + ")");
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || !(learning_rate > 0) ||
      early_stop_patience < 1 || val_records < 1)
    throw std::invalid_argument("TrainConfig: all fields must be positive");
}

namespace {

struct Tensors {
  int n = 0;
  int input_size = 0;
  std::vector<float> inputs;   // n x input_size, normalized
  std::vector<float> targets;  // n x 4, normalized
};

Tensors make_tensors(const Dataset& ds, const Normalization& norm) {
  Tensors t;
  t.n = static_cast<int>(ds.records.size());
  t.input_size = kNumChannels * kNumDistancePoints;
  t.inputs.resize(static_cast<std::size_t>(t.n) * t.input_size);
  t.targets.resize(static_cast<std::size_t>(t.n) * kNumPumps);
  const float mean = static_cast<float>(norm.profile_mean);
  const float inv_std = static_cast<float>(1.0 / norm.profile_std);
  parallel_for(t.n, [&](int r) {
    const DatasetRecord& rec = ds.records[r];
    float* in = t.inputs.data() + static_cast<std::size_t>(r) * t.input_size;
    for (int i = 0; i < t.input_size; ++i)
      in[i] = (rec.profile_dbm[i] - mean) * inv_std;
    PumpVector p;
    for (int j = 0; j < kNumPumps; ++j) p[j] = rec.pumps_dbm[j];
    const std::array<double, kNumPumps> y = normalize_pumps(p, norm);
    for (int j = 0; j < kNumPumps; ++j)
      t.targets[static_cast<std::size_t>(r) * kNumPumps + j] =
          static_cast<float>(y[j]);
  });
  return t;
}

// Mean normalized MSE over the given samples. Chunked and order-fixed.
double eval_loss(const nn::Network<float>& net, const std::vector<float>& params,
                 const Tensors& t, const std::vector<int>& samples,
                 std::vector<nn::NetState<float>>& states) {
  const int n = static_cast<int>(samples.size());
  const int chunk = (n + kGradChunks - 1) / kGradChunks;
  std::array<double, kGradChunks> partial{};
  parallel_for(kGradChunks, [&](int c) {
    nn::NetState<float>& st = states[c];
    double acc = 0.0;
    for (int s = c * chunk; s < std::min(n, (c + 1) * chunk); ++s) {
      const int idx = samples[s];
      const float* in =
          t.inputs.data() + static_cast<std::size_t>(idx) * t.input_size;
      const float* out = net.forward(params, in, st);
      const float* tgt =
          t.targets.data() + static_cast<std::size_t>(idx) * kNumPumps;
      for (int j = 0; j < kNumPumps; ++j) {
        const double d = out[j] - tgt[j];
        acc += d * d;
      }
    }
    partial[c] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;  // fixed order
  return total / (4.0 * n);
}

}  // namespace

InverseModel train(const Dataset& ds, const ModelArchitecture& arch,
                   const TrainConfig& cfg, const PumpBounds& global_bounds,
                   TrainLog* log) {
  cfg.validate();
  const int n_total = static_cast<int>(ds.records.size());
  const int n_train = n_total - cfg.val_records;
  if (n_train < 1)
    throw std::invalid_argument(
        "train: dataset smaller than the validation split");

  const Normalization norm = fit_normalization(ds, n_train, global_bounds);
  const Tensors t = make_tensors(ds, norm);

  nn::Network<float> net(arch);
  std::vector<float> params = net.init_params(derive_seed(cfg.seed, 0xc0deULL));
  const std::size_t np = params.size();

  std::vector<nn::NetState<float>> states;
  states.reserve(kGradChunks);
  for (int c = 0; c < kGradChunks; ++c) states.emplace_back(net.layout());
  std::vector<std::vector<float>> chunk_grads(
      kGradChunks, std::vector<float>(np, 0.0f));

  // Adam
  std::vector<float> m(np, 0.0f), v(np, 0.0f);
  const float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
  long long step = 0;

  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> val_idx(cfg.val_records);
  std::iota(val_idx.begin(), val_idx.end(), n_train);

  Rng shuffle_rng(derive_seed(cfg.seed, 0x575ffULL));

  std::vector<float> best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1, since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the run RNG
    for (int i = n_train - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.below(i + 1));
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    int n_batches = 0;
    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int bsz = std::min(cfg.batch_size, n_train - start);
      const int chunk = (bsz + kGradChunks - 1) / kGradChunks;
      std::array<double, kGradChunks> partial_loss{};

      parallel_for(kGradChunks, [&](int c) {
        std::vector<float>& grad = chunk_grads[c];
        std::fill(grad.begin(), grad.end(), 0.0f);
        nn::NetState<float>& st = states[c];
        double acc = 0.0;
        std::array<float, kNumPumps> dout;
        for (int s = c * chunk; s < std::min(bsz, (c + 1) * chunk); ++s) {
          const int idx = order[start + s];
          const float* in =
              t.inputs.data() + static_cast<std::size_t>(idx) * t.input_size;
          const float* out = net.forward(params, in, st);
          const float* tgt =
              t.targets.data() + static_cast<std::size_t>(idx) * kNumPumps;
          for (int j = 0; j < kNumPumps; ++j) {
            const float d = out[j] - tgt[j];
            acc += static_cast<double>(d) * d;
            dout[j] = 0.5f * d;  // d/dout of (1/4) sum d^2
          }
          net.backward(params, in, dout.data(), st, grad);
        }
        partial_loss[c] = acc;
      });

      double batch_loss = 0.0;
      for (double pl : partial_loss) batch_loss += pl;
      batch_loss /= 4.0 * bsz;
      epoch_loss += batch_loss;
      ++n_batches;

      if (!std::isfinite(batch_loss))
        throw NumericError("train: loss diverged (non-finite) at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(n_batches) +
                           "; lower the learning rate");

      // ordered chunk reduction, then Adam
      std::vector<float>& g = chunk_grads[0];
      for (int c = 1; c < kGradChunks; ++c) {
        const std::vector<float>& gc = chunk_grads[c];
        for (std::size_t i = 0; i < np; ++i) g[i] += gc[i];
      }
      const float scale = 1.0f / static_cast<float>(bsz);
      ++step;
      const float lr = static_cast<float>(cfg.learning_rate);
      const float bc1 = 1.0f - std::pow(beta1, static_cast<float>(step));
      const float bc2 = 1.0f - std::pow(beta2, static_cast<float>(step));
      for (std::size_t i = 0; i < np; ++i) {
        const float gi = g[i] * scale;
        m[i] = beta1 * m[i] + (1.0f - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0f - beta2) * gi * gi;
        params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
      }
    }

    const double val = eval_loss(net, params, t, val_idx, states);
    if (log) {
      log->train_loss.push_back(epoch_loss / n_batches);
      log->val_loss.push_back(val);
    }
    if (val < best_val) {
      best_val = val;
      best_params = params;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience) {
      break;
    }
  }

  if (log) log->best_epoch = best_epoch;

  InverseModel model;
  model.arch = arch;
  model.norm = norm;
  model.weights = std::move(best_params);
  return model;
}

PumpVector predict(const InverseModel& model, const PowerProfile2D& profile) {
  model.validate();
  if (static_cast<int>(profile.values.rows) != model.arch.input_rows ||
      static_cast<int>(profile.values.cols) != model.arch.input_cols)
    throw std::invalid_argument("predict: profile shape does not match model");

  nn::Network<float> net(model.arch);
  nn::NetState<float> state(net.layout());
  std::vector<float> in(profile.values.data.size());
  const float mean = static_cast<float>(model.norm.profile_mean);
  const float inv_std = static_cast<float>(1.0 / model.norm.profile_std);
  for (std::size_t i = 0; i < in.size(); ++i)
    in[i] = (static_cast<float>(profile.values.data[i]) - mean) * inv_std;

  const float* out = net.forward(model.weights, in.data(), state);
  std::array<double, kNumPumps> y{};
  for (int j = 0; j < kNumPumps; ++j) y[j] = out[j];
  PumpVector p = denormalize_pumps(y, model.norm);
  for (int j = 0; j < kNumPumps; ++j) {
    if (!std::isfinite(p[j]))
      throw NumericError("predict: non-finite pump prediction");
    p[j] = std::clamp(p[j], model.norm.pump_min[j], model.norm.pump_max[j]);
  }
  return p;
}

std::array<double, kNumPumps> r2_score(const std::vector<PumpVector>& truth,
                                       const std::vector<PumpVector>& pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("r2_score: length mismatch");
  if (truth.size() < 2)
    throw std::invalid_argument("r2_score: need at least 2 samples");
  const double n = static_cast<double>(truth.size());
  std::array<double, kNumPumps> r2{};
  for (int j = 0; j < kNumPumps; ++j) {
    double mean = 0.0;
    for (const PumpVector& p : truth) mean += p[j];
    mean /= n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      ss_tot += (truth[i][j] - mean) * (truth[i][j] - mean);
      ss_res += (truth[i][j] - pred[i][j]) * (truth[i][j] - pred[i][j]);
    }
    if (!(ss_tot > 0))
      throw std::invalid_argument("r2_score: zero variance in truth for pump " +
                                  std::to_string(j + 1));
    r2[j] = 1.0 - ss_res / ss_tot;
  }
  return r2;
}

double fraction_below(const std::vector<double>& errors_db, double level_db) {
  if (errors_db.empty())
    throw std::invalid_argument("fraction_below: empty input");
  std::size_t count = 0;
  for (double e : errors_db)
    if (e < level_db) ++count;
  return static_cast<double>(count) / static_cast<double>(errors_db.size());
}

MaeStatistics mae_statistics(const std::vector<double>& errors_db) {
  if (errors_db.empty())
    throw std::invalid_argument("mae_statistics: empty input");
  MaeStatistics st;
  const double n = static_cast<double>(errors_db.size());
  double sum = 0.0;
  double max_err = 0.0;
  for (double e : errors_db) {
    sum += e;
    max_err = std::max(max_err, e);
  }
  st.mean = sum / n;
  double ss = 0.0;
  for (double e : errors_db) ss += (e - st.mean) * (e - st.mean);
  st.std_dev = errors_db.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  st.fraction_below_half = fraction_below(errors_db, 0.5);
  st.fraction_below_one = fraction_below(errors_db, 1.0);

  const int n_bins = std::max(1, static_cast<int>(max_err / st.bin_width) + 1);
  st.histogram.assign(n_bins, 0);
  for (double e : errors_db) {
    int b = static_cast<int>(e / st.bin_width);
    b = std::clamp(b, 0, n_bins - 1);
    ++st.histogram[b];
  }
  st.cdf.resize(n_bins);
  double running = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    running += st.histogram[b];
    st.cdf[b] = running / n;
  }
  return st;
}

namespace {

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

  void need(std::size_t n) const {
    if (pos + n > buf.size())
      throw FormatError("model_load: truncated file at offset " +
                        std::to_string(pos));
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
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
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i]))
           << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos + i]))
           << (8 * i);
    pos += 8;
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

}  // namespace

void model_save(const InverseModel& model, const std::string& path) {
  model.validate();
  std::string buf;
  buf.reserve(128 + model.weights.size() * 4);
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(model.arch.input_rows));
  put_u32(buf, static_cast<std::uint32_t>(model.arch.input_cols));
  for (const ConvSpec& c : model.arch.conv) {
    put_u32(buf, static_cast<std::uint32_t>(c.out_channels));
    put_u32(buf, static_cast<std::uint32_t>(c.kernel));
    buf.push_back(c.pool ? 1 : 0);
  }
  put_u32(buf, static_cast<std::uint32_t>(model.arch.dense[0]));
  put_u32(buf, static_cast<std::uint32_t>(model.arch.dense[1]));
  put_u32(buf, static_cast<std::uint32_t>(model.arch.outputs));
  buf.push_back(model.norm.fitted ? 1 : 0);
  put_f64(buf, model.norm.profile_mean);
  put_f64(buf, model.norm.profile_std);
  for (double v : model.norm.pump_min) put_f64(buf, v);
  for (double v : model.norm.pump_max) put_f64(buf, v);
  put_u64(buf, model.weights.size());
  for (float w : model.weights) put_f32(buf, w);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("model_save: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("model_save: write failed for " + path);
}

InverseModel model_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("model_load: cannot open " + path);
  const std::string buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  Reader rd{buf, 0};
  rd.need(4);
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw FormatError("model_load: bad magic (expected RINV) in " + path);
  rd.pos = 4;
  if (rd.u16() != kVersion)
    throw FormatError("model_load: unsupported version");

  InverseModel model;
  model.arch.input_rows = static_cast<int>(rd.u32());
  model.arch.input_cols = static_cast<int>(rd.u32());
  for (ConvSpec& c : model.arch.conv) {
    c.out_channels = static_cast<int>(rd.u32());
    c.kernel = static_cast<int>(rd.u32());
    c.pool = rd.u8() != 0;
  }
  model.arch.dense[0] = static_cast<int>(rd.u32());
  model.arch.dense[1] = static_cast<int>(rd.u32());
  model.arch.outputs = static_cast<int>(rd.u32());
  model.norm.fitted = rd.u8() != 0;
  model.norm.profile_mean = rd.f64();
  model.norm.profile_std = rd.f64();
  for (double& v : model.norm.pump_min) v = rd.f64();
  for (double& v : model.norm.pump_max) v = rd.f64();
  const std::uint64_t count = rd.u64();
  model.arch.validate();
  if (count != static_cast<std::uint64_t>(nn::weight_count(model.arch)))
    throw FormatError("model_load: weight count " + std::to_string(count) +
                      " does not match the architecture (expected " +
                      std::to_string(nn::weight_count(model.arch)) + ")");
  model.weights.resize(count);
  for (float& w : model.weights) w = rd.f32();
  if (rd.pos != buf.size())
    throw FormatError("model_load: trailing bytes after weights");
  model.validate();
  return model;
}

}  // namespace raman
