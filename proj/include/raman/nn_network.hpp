#pragma once

// Minimal CNN engine behind the inverse model: four stride-1 'same'
// convolutions with optional 2x2 mean pooling, two rectified dense layers
// and a linear head. Templated on the scalar so training runs in float
// while gradient verification runs in double.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "raman/rng.hpp"

namespace raman::nn {

struct ConvSpec {
  int out_channels = 0;
  int kernel = 3;
  bool pool = false;  // 2x2 mean pool after the rectifier
};

struct ModelArchitecture {
  int input_rows = 44;
  int input_cols = 100;
  std::array<ConvSpec, 4> conv{};
  std::array<int, 2> dense{};
  int outputs = 4;

  static ModelArchitecture canonical() {
    ModelArchitecture a;
    a.conv = {ConvSpec{16, 3, true}, ConvSpec{32, 3, true},
              ConvSpec{64, 3, true}, ConvSpec{64, 3, false}};
    a.dense = {256, 128};
    return a;
  }

  // Small enough to finite-difference every parameter.
  static ModelArchitecture tiny() {
    ModelArchitecture a;
    a.input_rows = 6;
    a.input_cols = 8;
    a.conv = {ConvSpec{2, 2, true}, ConvSpec{2, 2, true}, ConvSpec{2, 2, false},
              ConvSpec{2, 2, false}};
    a.dense = {3, 3};
    return a;
  }

  void validate() const;
};

// Parameter offsets and per-layer shapes derived from an architecture.
// Weight order in the flat parameter vector (and in model files):
// conv1 W[oc][ic][ky][kx], conv1 b, ..., conv4 b, fc1 W[out][in], fc1 b,
// fc2 W, fc2 b, head W, head b.
struct Layout {
  struct Conv {
    int w_off, b_off;
    int in_ch, out_ch, kernel;
    int h, w;            // spatial size (same padding keeps it)
    int pooled_h, pooled_w;
    bool pool;
  };
  struct Dense {
    int w_off, b_off;
    int in, out;
  };

  std::array<Conv, 4> conv{};
  std::array<Dense, 3> dense{};
  int flat_size = 0;
  std::int64_t total_params = 0;

  explicit Layout(const ModelArchitecture& a) {
    a.validate();
    std::int64_t off = 0;
    int ch = 1, h = a.input_rows, w = a.input_cols;
    for (int l = 0; l < 4; ++l) {
      Conv& c = conv[l];
      c.in_ch = ch;
      c.out_ch = a.conv[l].out_channels;
      c.kernel = a.conv[l].kernel;
      c.h = h;
      c.w = w;
      c.pool = a.conv[l].pool;
      c.pooled_h = c.pool ? h / 2 : h;
      c.pooled_w = c.pool ? w / 2 : w;
      if (c.pooled_h < 1 || c.pooled_w < 1)
        throw std::invalid_argument("ModelArchitecture: pooling shrinks layer " +
                                    std::to_string(l + 1) + " below 1x1");
      c.w_off = static_cast<int>(off);
      off += static_cast<std::int64_t>(c.out_ch) * c.in_ch * c.kernel * c.kernel;
      c.b_off = static_cast<int>(off);
      off += c.out_ch;
      ch = c.out_ch;
      h = c.pooled_h;
      w = c.pooled_w;
    }
    flat_size = ch * h * w;
    const std::array<int, 3> sizes{a.dense[0], a.dense[1], a.outputs};
    int in = flat_size;
    for (int l = 0; l < 3; ++l) {
      Dense& d = dense[l];
      d.in = in;
      d.out = sizes[l];
      d.w_off = static_cast<int>(off);
      off += static_cast<std::int64_t>(d.in) * d.out;
      d.b_off = static_cast<int>(off);
      off += d.out;
      in = d.out;
    }
    total_params = off;
  }
};

inline void ModelArchitecture::validate() const {
  for (const ConvSpec& c : conv) {
    if (c.out_channels < 1)
      throw std::invalid_argument("ModelArchitecture: conv channels must be >= 1");
    if (c.kernel < 1)
      throw std::invalid_argument("ModelArchitecture: kernel must be >= 1");
  }
  if (dense[0] < 1 || dense[1] < 1)
    throw std::invalid_argument("ModelArchitecture: dense sizes must be >= 1");
  if (outputs != 4)
    throw std::invalid_argument("ModelArchitecture: output layer must have 4 units");
  if (input_rows < 1 || input_cols < 1)
    throw std::invalid_argument("ModelArchitecture: input dims must be >= 1");
}

inline std::int64_t weight_count(const ModelArchitecture& a) {
  return Layout(a).total_params;
}

// Per-sample activation and delta buffers, reusable across samples.
template <class Real>
struct NetState {
  // act[l]: conv l post-rectifier [out_ch][h][w]; pooled[l] after pooling.
  std::array<std::vector<Real>, 4> act, pooled, d_act, d_pooled;
  std::array<std::vector<Real>, 3> dense_out, d_dense;
  std::vector<Real> d_input;

  explicit NetState(const Layout& L) {
    for (int l = 0; l < 4; ++l) {
      act[l].resize(static_cast<std::size_t>(L.conv[l].out_ch) * L.conv[l].h *
                    L.conv[l].w);
      d_act[l].resize(act[l].size());
      pooled[l].resize(static_cast<std::size_t>(L.conv[l].out_ch) *
                       L.conv[l].pooled_h * L.conv[l].pooled_w);
      d_pooled[l].resize(pooled[l].size());
    }
    for (int l = 0; l < 3; ++l) {
      dense_out[l].resize(L.dense[l].out);
      d_dense[l].resize(L.dense[l].out);
    }
    d_input.resize(static_cast<std::size_t>(L.conv[0].in_ch) * L.conv[0].h *
                   L.conv[0].w);
  }
};

namespace detail {

template <class Real>
void conv_forward(const Layout::Conv& c, const Real* params, const Real* in,
                  Real* out) {
  const int k = c.kernel, pad = (c.kernel - 1) / 2;
  const int plane = c.h * c.w;
  for (int oc = 0; oc < c.out_ch; ++oc) {
    Real* dst = out + oc * plane;
    const Real bias = params[c.b_off + oc];
    for (int i = 0; i < plane; ++i) dst[i] = bias;
    for (int ic = 0; ic < c.in_ch; ++ic) {
      const Real* src_plane = in + ic * plane;
      const Real* w = params + c.w_off + ((oc * c.in_ch) + ic) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const Real wv = w[ky * k + kx];
          const int y0 = std::max(0, -dy), y1 = std::min(c.h, c.h - dy);
          const int x0 = std::max(0, -dx), x1 = std::min(c.w, c.w - dx);
          for (int y = y0; y < y1; ++y) {
            const Real* s = src_plane + (y + dy) * c.w + dx;
            Real* d = dst + y * c.w;
            for (int x = x0; x < x1; ++x) d[x] += wv * s[x];
          }
        }
      }
    }
    for (int i = 0; i < plane; ++i)
      if (dst[i] < Real(0)) dst[i] = Real(0);  // rectifier
  }
}

// Gradients for one conv layer. d_out is d(loss)/d(post-rectifier act);
// writes weight/bias grads (accumulated) and d_in (overwritten).
template <class Real>
void conv_backward(const Layout::Conv& c, const Real* params, const Real* in,
                   const Real* act, Real* d_out, Real* grad, Real* d_in) {
  const int k = c.kernel, pad = (c.kernel - 1) / 2;
  const int plane = c.h * c.w;
  // rectifier gate in place
  for (int i = 0; i < c.out_ch * plane; ++i)
    if (act[i] <= Real(0)) d_out[i] = Real(0);

  for (int i = 0; i < c.in_ch * plane; ++i) d_in[i] = Real(0);

  for (int oc = 0; oc < c.out_ch; ++oc) {
    const Real* dz = d_out + oc * plane;
    Real bsum = 0;
    for (int i = 0; i < plane; ++i) bsum += dz[i];
    grad[c.b_off + oc] += bsum;
    for (int ic = 0; ic < c.in_ch; ++ic) {
      const Real* src_plane = in + ic * plane;
      Real* din_plane = d_in + ic * plane;
      const int wbase = c.w_off + ((oc * c.in_ch) + ic) * k * k;
      const Real* w = params + wbase;
      Real* gw = grad + wbase;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const int y0 = std::max(0, -dy), y1 = std::min(c.h, c.h - dy);
          const int x0 = std::max(0, -dx), x1 = std::min(c.w, c.w - dx);
          Real acc = 0;
          const Real wv = w[ky * k + kx];
          for (int y = y0; y < y1; ++y) {
            const Real* s = src_plane + (y + dy) * c.w + dx;
            Real* di = din_plane + (y + dy) * c.w + dx;
            const Real* dzr = dz + y * c.w;
            for (int x = x0; x < x1; ++x) {
              acc += dzr[x] * s[x];
              di[x] += wv * dzr[x];
            }
          }
          gw[ky * k + kx] += acc;
        }
      }
    }
  }
}

template <class Real>
void pool_forward(const Layout::Conv& c, const Real* act, Real* out) {
  if (!c.pool) {
    for (int i = 0; i < c.out_ch * c.h * c.w; ++i) out[i] = act[i];
    return;
  }
  const int plane = c.h * c.w, pplane = c.pooled_h * c.pooled_w;
  for (int oc = 0; oc < c.out_ch; ++oc) {
    const Real* a = act + oc * plane;
    Real* p = out + oc * pplane;
    for (int py = 0; py < c.pooled_h; ++py)
      for (int px = 0; px < c.pooled_w; ++px) {
        const int y = 2 * py, x = 2 * px;
        p[py * c.pooled_w + px] =
            Real(0.25) * (a[y * c.w + x] + a[y * c.w + x + 1] +
                          a[(y + 1) * c.w + x] + a[(y + 1) * c.w + x + 1]);
      }
  }
}

template <class Real>
void pool_backward(const Layout::Conv& c, const Real* d_pooled, Real* d_act) {
  if (!c.pool) {
    for (int i = 0; i < c.out_ch * c.h * c.w; ++i) d_act[i] = d_pooled[i];
    return;
  }
  const int plane = c.h * c.w, pplane = c.pooled_h * c.pooled_w;
  for (int i = 0; i < c.out_ch * plane; ++i) d_act[i] = Real(0);
  for (int oc = 0; oc < c.out_ch; ++oc) {
    const Real* dp = d_pooled + oc * pplane;
    Real* da = d_act + oc * plane;
    for (int py = 0; py < c.pooled_h; ++py)
      for (int px = 0; px < c.pooled_w; ++px) {
        const Real g = Real(0.25) * dp[py * c.pooled_w + px];
        const int y = 2 * py, x = 2 * px;
        da[y * c.w + x] += g;
        da[y * c.w + x + 1] += g;
        da[(y + 1) * c.w + x] += g;
        da[(y + 1) * c.w + x + 1] += g;
      }
  }
}

}  // namespace detail

template <class Real>
class Network {
 public:
  explicit Network(const ModelArchitecture& arch) : arch_(arch), layout_(arch) {}

  const Layout& layout() const { return layout_; }
  const ModelArchitecture& arch() const { return arch_; }
  std::int64_t param_count() const { return layout_.total_params; }

  // Fan-in scaled uniform init (rectifier gain), biases zero.
  std::vector<Real> init_params(std::uint64_t seed) const {
    std::vector<Real> p(layout_.total_params, Real(0));
    Rng rng(seed);
    for (const Layout::Conv& c : layout_.conv) {
      const double limit = std::sqrt(6.0 / (c.in_ch * c.kernel * c.kernel));
      const int n = c.out_ch * c.in_ch * c.kernel * c.kernel;
      for (int i = 0; i < n; ++i)
        p[c.w_off + i] = static_cast<Real>(rng.uniform(-limit, limit));
    }
    for (const Layout::Dense& d : layout_.dense) {
      const double limit = std::sqrt(6.0 / d.in);
      for (int i = 0; i < d.in * d.out; ++i)
        p[d.w_off + i] = static_cast<Real>(rng.uniform(-limit, limit));
    }
    return p;
  }

  // input: [1 x rows x cols] plane. Returns pointer to the 4 outputs held in
  // state.dense_out[2].
  const Real* forward(const std::vector<Real>& params, const Real* input,
                      NetState<Real>& s) const {
    const Real* in = input;
    for (int l = 0; l < 4; ++l) {
      detail::conv_forward(layout_.conv[l], params.data(), in, s.act[l].data());
      detail::pool_forward(layout_.conv[l], s.act[l].data(), s.pooled[l].data());
      in = s.pooled[l].data();
    }
    for (int l = 0; l < 3; ++l) {
      const Layout::Dense& d = layout_.dense[l];
      const Real* src = (l == 0) ? s.pooled[3].data() : s.dense_out[l - 1].data();
      Real* dst = s.dense_out[l].data();
      for (int o = 0; o < d.out; ++o) {
        const Real* w = params.data() + d.w_off + o * d.in;
        Real acc = params[d.b_off + o];
        for (int i = 0; i < d.in; ++i) acc += w[i] * src[i];
        dst[o] = (l < 2 && acc < Real(0)) ? Real(0) : acc;  // linear head
      }
    }
    return s.dense_out[2].data();
  }

  // d_output: d(loss)/d(head outputs), length 4. Accumulates parameter
  // gradients into grad (same layout as params). forward() must have run on
  // this state with the same input.
  void backward(const std::vector<Real>& params, const Real* input,
                const Real* d_output, NetState<Real>& s,
                std::vector<Real>& grad) const {
    for (int o = 0; o < layout_.dense[2].out; ++o) s.d_dense[2][o] = d_output[o];
    for (int l = 2; l >= 0; --l) {
      const Layout::Dense& d = layout_.dense[l];
      const Real* src = (l == 0) ? s.pooled[3].data() : s.dense_out[l - 1].data();
      Real* d_src = (l == 0) ? s.d_pooled[3].data() : s.d_dense[l - 1].data();
      const Real* dz = s.d_dense[l].data();
      for (int i = 0; i < d.in; ++i) d_src[i] = Real(0);
      for (int o = 0; o < d.out; ++o) {
        Real g = dz[o];
        if (l < 2 && s.dense_out[l][o] <= Real(0)) g = Real(0);
        grad[d.b_off + o] += g;
        const Real* w = params.data() + d.w_off + o * d.in;
        Real* gw = grad.data() + d.w_off + o * d.in;
        for (int i = 0; i < d.in; ++i) {
          gw[i] += g * src[i];
          d_src[i] += g * w[i];
        }
      }
    }
    for (int l = 3; l >= 0; --l) {
      detail::pool_backward(layout_.conv[l], s.d_pooled[l].data(),
                            s.d_act[l].data());
      const Real* in = (l == 0) ? input : s.pooled[l - 1].data();
      Real* d_in = (l == 0) ? s.d_input.data() : s.d_pooled[l - 1].data();
      detail::conv_backward(layout_.conv[l], params.data(), in,
                            s.act[l].data(), s.d_act[l].data(), grad.data(),
                            d_in);
    }
  }

 private:
  ModelArchitecture arch_;
  Layout layout_;
};

}  // namespace raman::nn
