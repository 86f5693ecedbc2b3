// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Streaming float32 inference for the two-stage network.
//
// Per frame the encoder takes normalized ERB features [B] and DF features
// [2][F_df] (real plane, then imaginary plane) and produces one embedding
// plus the skip activations the ERB decoder consumes. Only the two causal
// input convolutions and the GRU carry state between frames.

#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dfn/deep_filter.hpp"
#include "dfn/layers.hpp"
#include "dfn/weights.hpp"

namespace dfn {

struct EncoderOutput {
  std::vector<float> e0, e1, e2, e3;  // ERB path: [C][B], [C][B/2], [C][B/4] x2
  std::vector<float> c0;              // DF path input conv: [C][F_df]
  std::vector<float> emb;             // GRU output [H]
};

struct NetState {
  ConvHistory erb_conv0;
  ConvHistory df_conv0;
  std::vector<float> hidden;

  void Reset();
  std::size_t conv_state_size() const {
    return erb_conv0.state_size() + df_conv0.state_size();
  }
  std::size_t state_size() const { return conv_state_size() + hidden.size(); }
};

struct NetOutput {
  std::vector<float> gains;  // [B], in [0, 1]
  DfCoefSet<float> coefs;    // [N][F_df]
};

class DfNet {
 public:
  explicit DfNet(std::shared_ptr<const ModelWeights> weights);

  const ModelConfig& config() const { return weights_->config(); }
  const ModelWeights& weights() const { return *weights_; }

  NetState NewState() const;

  EncoderOutput Encode(NetState& state, std::span<const float> erb_feat,
                       std::span<const float> df_feat) const;
  std::vector<float> DecodeErb(const EncoderOutput& enc) const;
  DfCoefSet<float> DecodeDf(const EncoderOutput& enc) const;

  NetOutput Step(NetState& state, std::span<const float> erb_feat,
                 std::span<const float> df_feat) const;

  // Whole-clip route: convolutions run over [C][T][F] tensors with causal
  // time padding, the GRU over the sequence. erb_feats is [T][B], df_feats
  // is [T][2][F_df]. Matches Step() frame for frame.
  std::vector<NetOutput> ForwardClip(const Tensor& erb_feats,
                                     const Tensor& df_feats) const;

 private:
  struct Bound {
    LayerSpec spec;
    const Tensor* weight = nullptr;
    const Tensor* bias = nullptr;
    GruWeights gru{};
  };

  const Bound& At(const std::string& name) const;
  std::vector<float> Conv1(const std::string& name,
                           std::span<const float> in) const;
  std::vector<float> Separable(const std::string& name,
                               std::span<const float> in) const;
  std::vector<float> Linear(const std::string& name, std::span<const float> in,
                            bool relu) const;
  std::vector<float> EmbedTail(std::span<const float> e3,
                               std::span<const float> c3,
                               std::span<float> hidden) const;
  Tensor SeparableClip(const std::string& name, const Tensor& in) const;

  std::shared_ptr<const ModelWeights> weights_;
  std::map<std::string, Bound, std::less<>> layers_;
};

}  // namespace dfn
