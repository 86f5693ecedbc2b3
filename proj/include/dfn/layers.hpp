// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Layer descriptions and float32 kernels for streaming inference.
//
// Tensor layouts:
//   conv, pathway_conv  weight [out][in / groups][kernel_t][kernel_f], bias [out]
//   tconv               weight [in][out / groups][kernel_t][kernel_f], bias [out]
//   grouped_linear      weight [groups][out / groups][in / groups], bias [out]
//   gru                 weight_ih [3H][I], weight_hh [3H][H], bias_ih [3H],
//                       bias_hh [3H]; gate order (reset, update, candidate)

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfn/tensor.hpp"

namespace dfn {

enum class LayerKind {
  kConv,
  kTConv,
  kPathwayConv,
  kGroupedLinear,
  kGru,
  kActivation
};

enum class Activation { kRelu, kSigmoid };

std::string ToString(LayerKind kind);

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kConv;
  // Channels for convolutions, features for linear layers, (input, hidden)
  // sizes for the GRU.
  int in_channels = 1;
  int out_channels = 1;
  int in_freq = 1;
  int out_freq = 1;
  int kernel_t = 1;
  int kernel_f = 1;
  int groups = 1;
  int stride_f = 1;
  // Past input frames the layer retains between steps (kernel_t - 1).
  int causal_context = 0;
  bool bias = true;
  Activation activation = Activation::kRelu;  // kActivation only
};

struct TensorSpec {
  std::string name;
  Tensor::Shape shape;
};

// Named tensors a layer owns, in storage order.
std::vector<TensorSpec> LayerTensors(const LayerSpec& spec);
std::int64_t LayerParams(const LayerSpec& spec);
// Multiply-accumulates for one frame; bias additions are not counted.
std::int64_t LayerMacsPerFrame(const LayerSpec& spec);

// Throws ConfigError if channel/group/stride fields are inconsistent.
void ValidateLayer(const LayerSpec& spec);

// Output frequency size of a convolution with symmetric "same" padding
// followed by stride: (F + 2 * (k / 2) - k) / s + 1.
int ConvOutFreq(int in_freq, int kernel_f, int stride_f);

// One time tap of a convolution input: a [channels][freq] slab whose channels
// are `channel_stride` floats apart. A null `data` reads as zeros.
struct ConvTap {
  const float* data = nullptr;
  std::size_t channel_stride = 0;
};

// Computes one output frame of a conv/pathway layer. `taps` holds kernel_t
// input frames, oldest first. Output is [out][out_freq] with the given
// channel stride.
void ConvFrame(const LayerSpec& spec, const float* weight, const float* bias,
               std::span<const ConvTap> taps, float* out,
               std::size_t out_channel_stride);

// Transposed convolution over frequency (kernel_t must be 1).
void TConvFrame(const LayerSpec& spec, const float* weight, const float* bias,
                const float* in, float* out);

// Offline convolution over a [in][T][F] tensor with causal time padding.
Tensor ConvOffline(const LayerSpec& spec, const Tensor& weight,
                   const Tensor* bias, const Tensor& input);

// Streaming history for a causal convolution: the last causal_context input
// frames, zero-initialized.
class ConvHistory {
 public:
  ConvHistory() = default;
  explicit ConvHistory(const LayerSpec& spec);

  // Runs the layer on `frame` ([in][in_freq]) and pushes it into history.
  void Step(const LayerSpec& spec, const float* weight, const float* bias,
            std::span<const float> frame, std::span<float> out);
  void Reset();
  std::size_t state_size() const { return frames_.size(); }

 private:
  int context_ = 0;
  std::size_t frame_size_ = 0;
  std::vector<float> frames_;  // oldest first
};

void GroupedLinear(const LayerSpec& spec, const float* weight,
                   const float* bias, std::span<const float> in,
                   std::span<float> out);

struct GruWeights {
  const float* weight_ih;
  const float* weight_hh;
  const float* bias_ih;
  const float* bias_hh;
};

// One GRU step. `hidden` is updated in place and is also the output.
void GruStep(const LayerSpec& spec, const GruWeights& w,
             std::span<const float> input, std::span<float> hidden);

void ApplyActivation(Activation act, std::span<float> x);

inline float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace dfn
