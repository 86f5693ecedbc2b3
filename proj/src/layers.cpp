// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace dfn {

namespace {

float Dot(const float* a, const float* b, int n) {
  float acc[8] = {};
  int i = 0;
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
  float sum = ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
              ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

std::string Where(const LayerSpec& spec) { return "layer '" + spec.name + "': "; }

}  // namespace

std::string ToString(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kTConv:
      return "tconv";
    case LayerKind::kPathwayConv:
      return "pathway_conv";
    case LayerKind::kGroupedLinear:
      return "grouped_linear";
    case LayerKind::kGru:
      return "gru";
    case LayerKind::kActivation:
      return "activation";
  }
  return "unknown";
}

int ConvOutFreq(int in_freq, int kernel_f, int stride_f) {
  return (in_freq + 2 * (kernel_f / 2) - kernel_f) / stride_f + 1;
}

std::vector<TensorSpec> LayerTensors(const LayerSpec& s) {
  const auto ci = static_cast<std::size_t>(s.in_channels);
  const auto co = static_cast<std::size_t>(s.out_channels);
  const auto g = static_cast<std::size_t>(s.groups);
  const auto kt = static_cast<std::size_t>(s.kernel_t);
  const auto kf = static_cast<std::size_t>(s.kernel_f);
  std::vector<TensorSpec> out;
  switch (s.kind) {
    case LayerKind::kConv:
    case LayerKind::kPathwayConv:
      out.push_back({s.name + ".weight", {co, ci / g, kt, kf}});
      if (s.bias) out.push_back({s.name + ".bias", {co}});
      break;
    case LayerKind::kTConv:
      out.push_back({s.name + ".weight", {ci, co / g, kt, kf}});
      if (s.bias) out.push_back({s.name + ".bias", {co}});
      break;
    case LayerKind::kGroupedLinear:
      out.push_back({s.name + ".weight", {g, co / g, ci / g}});
      if (s.bias) out.push_back({s.name + ".bias", {co}});
      break;
    case LayerKind::kGru:
      out.push_back({s.name + ".weight_ih", {3 * co, ci}});
      out.push_back({s.name + ".weight_hh", {3 * co, co}});
      if (s.bias) {
        out.push_back({s.name + ".bias_ih", {3 * co}});
        out.push_back({s.name + ".bias_hh", {3 * co}});
      }
      break;
    case LayerKind::kActivation:
      break;
  }
  return out;
}

std::int64_t LayerParams(const LayerSpec& spec) {
  std::int64_t n = 0;
  for (const auto& t : LayerTensors(spec))
    n += static_cast<std::int64_t>(Tensor::Count(t.shape));
  return n;
}

std::int64_t LayerMacsPerFrame(const LayerSpec& s) {
  const std::int64_t ci = s.in_channels, co = s.out_channels, g = s.groups;
  const std::int64_t kt = s.kernel_t, kf = s.kernel_f;
  switch (s.kind) {
    case LayerKind::kConv:
    case LayerKind::kPathwayConv:
      return co * (ci / g) * kt * kf * s.out_freq;
    case LayerKind::kTConv:
      return ci * (co / g) * kt * kf * s.in_freq;
    case LayerKind::kGroupedLinear:
      return ci * co / g;
    case LayerKind::kGru:
      return 3 * co * (ci + co);
    case LayerKind::kActivation:
      return 0;
  }
  return 0;
}

void ValidateLayer(const LayerSpec& s) {
  if (s.in_channels < 1 || s.out_channels < 1 || s.groups < 1)
    throw ConfigError(Where(s) + "sizes and groups must be positive");
  if (s.kind == LayerKind::kActivation) return;
  if (s.kind == LayerKind::kGru) {
    if (s.groups != 1) throw ConfigError(Where(s) + "GRU cannot be grouped");
    return;
  }
  if (s.in_channels % s.groups != 0 || s.out_channels % s.groups != 0)
    throw ConfigError(Where(s) + "in/out size " + std::to_string(s.in_channels) +
                      "/" + std::to_string(s.out_channels) +
                      " not divisible by groups " + std::to_string(s.groups));
  if (s.kind == LayerKind::kGroupedLinear) return;
  if (s.kernel_t < 1 || s.kernel_f < 1 || s.kernel_f % 2 == 0 || s.stride_f < 1)
    throw ConfigError(Where(s) + "kernel must be positive with odd width");
  if (s.causal_context != s.kernel_t - 1)
    throw ConfigError(Where(s) + "causal_context must equal kernel_t - 1");
  if (s.kind == LayerKind::kTConv) {
    if (s.kernel_t != 1)
      throw ConfigError(Where(s) + "transposed conv must be 1 frame wide");
    if (s.out_freq != s.in_freq * s.stride_f)
      throw ConfigError(Where(s) + "tconv out_freq must be in_freq * stride");
  } else if (s.out_freq != ConvOutFreq(s.in_freq, s.kernel_f, s.stride_f)) {
    throw ConfigError(Where(s) + "conv out_freq inconsistent with stride");
  }
}

void ConvFrame(const LayerSpec& spec, const float* weight, const float* bias,
               std::span<const ConvTap> taps, float* out,
               std::size_t out_channel_stride) {
  const int cin_g = spec.in_channels / spec.groups;
  const int cout_g = spec.out_channels / spec.groups;
  const int kt = spec.kernel_t;
  const int kf = spec.kernel_f;
  const int stride = spec.stride_f;
  const int pad = kf / 2;
  const int fin = spec.in_freq;
  const int fout = spec.out_freq;
  if (static_cast<int>(taps.size()) != kt)
    throw ShapeError(Where(spec) + "expected " + std::to_string(kt) +
                     " time taps, got " + std::to_string(taps.size()));
  for (int co = 0; co < spec.out_channels; ++co) {
    float* o = out + static_cast<std::size_t>(co) * out_channel_stride;
    const float b = bias ? bias[co] : 0.0f;
    std::fill(o, o + fout, b);
    const int group = co / cout_g;
    for (int cl = 0; cl < cin_g; ++cl) {
      const int ci = group * cin_g + cl;
      for (int t = 0; t < kt; ++t) {
        const ConvTap& tap = taps[t];
        if (!tap.data) continue;
        const float* x = tap.data + static_cast<std::size_t>(ci) * tap.channel_stride;
        const float* w =
            weight + (static_cast<std::size_t>(co * cin_g + cl) * kt + t) * kf;
        for (int k = 0; k < kf; ++k) {
          const float wk = w[k];
          int lo = 0;
          while (lo < fout && lo * stride - pad + k < 0) ++lo;
          int hi = fout;
          while (hi > lo && (hi - 1) * stride - pad + k >= fin) --hi;
          if (stride == 1) {
            const float* xs = x + (k - pad);
            for (int f = lo; f < hi; ++f) o[f] += wk * xs[f];
          } else {
            for (int f = lo; f < hi; ++f) o[f] += wk * x[f * stride - pad + k];
          }
        }
      }
    }
  }
}

void TConvFrame(const LayerSpec& spec, const float* weight, const float* bias,
                const float* in, float* out) {
  const int cin_g = spec.in_channels / spec.groups;
  const int cout_g = spec.out_channels / spec.groups;
  const int kf = spec.kernel_f;
  const int stride = spec.stride_f;
  const int pad = kf / 2;
  const int fin = spec.in_freq;
  const int fout = spec.out_freq;
  for (int co = 0; co < spec.out_channels; ++co)
    std::fill(out + static_cast<std::size_t>(co) * fout,
              out + static_cast<std::size_t>(co + 1) * fout,
              bias ? bias[co] : 0.0f);
  for (int ci = 0; ci < spec.in_channels; ++ci) {
    const int group = ci / cin_g;
    const float* x = in + static_cast<std::size_t>(ci) * fin;
    for (int cl = 0; cl < cout_g; ++cl) {
      const int co = group * cout_g + cl;
      float* o = out + static_cast<std::size_t>(co) * fout;
      const float* w = weight + static_cast<std::size_t>(ci * cout_g + cl) * kf;
      for (int k = 0; k < kf; ++k)
        for (int fi = 0; fi < fin; ++fi) {
          const int fo = fi * stride - pad + k;
          if (fo >= 0 && fo < fout) o[fo] += w[k] * x[fi];
        }
    }
  }
}

Tensor ConvOffline(const LayerSpec& spec, const Tensor& weight,
                   const Tensor* bias, const Tensor& input) {
  if (input.rank() != 3 ||
      input.dim(0) != static_cast<std::size_t>(spec.in_channels) ||
      input.dim(2) != static_cast<std::size_t>(spec.in_freq))
    throw ShapeError(Where(spec) + "input shape " +
                     Tensor::ShapeString(input.shape()) + " does not match [" +
                     std::to_string(spec.in_channels) + ", T, " +
                     std::to_string(spec.in_freq) + "]");
  const std::size_t frames = input.dim(1);
  const std::size_t fin = static_cast<std::size_t>(spec.in_freq);
  const std::size_t fout = static_cast<std::size_t>(spec.out_freq);
  Tensor out({static_cast<std::size_t>(spec.out_channels), frames, fout});
  std::vector<ConvTap> taps(static_cast<std::size_t>(spec.kernel_t));
  for (std::size_t t = 0; t < frames; ++t) {
    for (int j = 0; j < spec.kernel_t; ++j) {
      const auto src = static_cast<std::ptrdiff_t>(t) - (spec.kernel_t - 1) + j;
      taps[j] = src < 0 ? ConvTap{}
                        : ConvTap{input.ptr() + static_cast<std::size_t>(src) * fin,
                                  frames * fin};
    }
    ConvFrame(spec, weight.ptr(), bias ? bias->ptr() : nullptr, taps,
              out.ptr() + t * fout, frames * fout);
  }
  return out;
}

ConvHistory::ConvHistory(const LayerSpec& spec)
    : context_(spec.causal_context),
      frame_size_(static_cast<std::size_t>(spec.in_channels) * spec.in_freq),
      frames_(static_cast<std::size_t>(spec.causal_context) * frame_size_, 0.0f) {}

void ConvHistory::Step(const LayerSpec& spec, const float* weight,
                       const float* bias, std::span<const float> frame,
                       std::span<float> out) {
  if (frame.size() != frame_size_)
    throw ShapeError(Where(spec) + "frame has " + std::to_string(frame.size()) +
                     " values, expected " + std::to_string(frame_size_));
  if (out.size() != static_cast<std::size_t>(spec.out_channels) * spec.out_freq)
    throw ShapeError(Where(spec) + "output buffer size mismatch");
  const auto fin = static_cast<std::size_t>(spec.in_freq);
  std::vector<ConvTap> taps(static_cast<std::size_t>(context_) + 1);
  for (int j = 0; j < context_; ++j)
    taps[j] = ConvTap{frames_.data() + j * frame_size_, fin};
  taps[context_] = ConvTap{frame.data(), fin};
  ConvFrame(spec, weight, bias, taps, out.data(),
            static_cast<std::size_t>(spec.out_freq));
  if (context_ > 0) {
    std::copy(frames_.begin() + frame_size_, frames_.end(), frames_.begin());
    std::copy(frame.begin(), frame.end(), frames_.end() - frame_size_);
  }
}

void ConvHistory::Reset() { std::fill(frames_.begin(), frames_.end(), 0.0f); }

void GroupedLinear(const LayerSpec& spec, const float* weight,
                   const float* bias, std::span<const float> in,
                   std::span<float> out) {
  if (in.size() != static_cast<std::size_t>(spec.in_channels) ||
      out.size() != static_cast<std::size_t>(spec.out_channels))
    throw ShapeError(Where(spec) + "expected " + std::to_string(spec.in_channels) +
                     " -> " + std::to_string(spec.out_channels) + ", got " +
                     std::to_string(in.size()) + " -> " +
                     std::to_string(out.size()));
  if (spec.in_channels % spec.groups != 0 || spec.out_channels % spec.groups != 0)
    throw ShapeError(Where(spec) + "features not divisible by groups");
  const int ig = spec.in_channels / spec.groups;
  const int og = spec.out_channels / spec.groups;
  for (int g = 0; g < spec.groups; ++g) {
    const float* x = in.data() + static_cast<std::size_t>(g) * ig;
    for (int o = 0; o < og; ++o) {
      const int idx = g * og + o;
      const float* w = weight + static_cast<std::size_t>(idx) * ig;
      out[idx] = Dot(w, x, ig) + (bias ? bias[idx] : 0.0f);
    }
  }
}

void GruStep(const LayerSpec& spec, const GruWeights& w,
             std::span<const float> input, std::span<float> hidden) {
  const int in_dim = spec.in_channels;
  const int h_dim = spec.out_channels;
  if (input.size() != static_cast<std::size_t>(in_dim) ||
      hidden.size() != static_cast<std::size_t>(h_dim))
    throw ShapeError(Where(spec) + "GRU expects input " + std::to_string(in_dim) +
                     " and hidden " + std::to_string(h_dim));
  std::vector<float> gi(static_cast<std::size_t>(3 * h_dim));
  std::vector<float> gh(static_cast<std::size_t>(3 * h_dim));
  for (int j = 0; j < 3 * h_dim; ++j) {
    gi[j] = Dot(w.weight_ih + static_cast<std::size_t>(j) * in_dim, input.data(),
                in_dim) +
            (w.bias_ih ? w.bias_ih[j] : 0.0f);
    gh[j] = Dot(w.weight_hh + static_cast<std::size_t>(j) * h_dim, hidden.data(),
                h_dim) +
            (w.bias_hh ? w.bias_hh[j] : 0.0f);
  }
  for (int j = 0; j < h_dim; ++j) {
    const float r = Sigmoid(gi[j] + gh[j]);
    const float z = Sigmoid(gi[h_dim + j] + gh[h_dim + j]);
    const float n = std::tanh(gi[2 * h_dim + j] + r * gh[2 * h_dim + j]);
    hidden[j] = (1.0f - z) * n + z * hidden[j];
  }
}

void ApplyActivation(Activation act, std::span<float> x) {
  switch (act) {
    case Activation::kRelu:
      for (float& v : x) v = std::max(v, 0.0f);
      break;
    case Activation::kSigmoid:
      for (float& v : x) v = Sigmoid(v);
      break;
  }
}

}  // namespace dfn
