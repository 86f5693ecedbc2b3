// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/network.hpp"

#include <algorithm>

namespace dfn {

namespace {

void AddInto(std::span<float> acc, std::span<const float> x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

// Frame t of a [C][T][F] tensor as a [C][F] vector.
std::vector<float> FrameOf(const Tensor& x, std::size_t t) {
  const std::size_t c = x.dim(0), frames = x.dim(1), f = x.dim(2);
  std::vector<float> out(c * f);
  for (std::size_t ch = 0; ch < c; ++ch)
    std::copy_n(x.ptr() + (ch * frames + t) * f, f, out.data() + ch * f);
  return out;
}

void ReluTensor(Tensor& t) { ApplyActivation(Activation::kRelu, t.data()); }

}  // namespace

void NetState::Reset() {
  erb_conv0.Reset();
  df_conv0.Reset();
  std::fill(hidden.begin(), hidden.end(), 0.0f);
}

DfNet::DfNet(std::shared_ptr<const ModelWeights> weights)
    : weights_(std::move(weights)) {
  if (!weights_) throw ConfigError("network: null weights");
  for (const auto& spec : ModelLayers(weights_->config())) {
    if (spec.kind == LayerKind::kActivation) continue;
    Bound b;
    b.spec = spec;
    if (spec.kind == LayerKind::kGru) {
      b.gru.weight_ih = weights_->Get(spec.name + ".weight_ih").ptr();
      b.gru.weight_hh = weights_->Get(spec.name + ".weight_hh").ptr();
      b.gru.bias_ih = spec.bias ? weights_->Get(spec.name + ".bias_ih").ptr() : nullptr;
      b.gru.bias_hh = spec.bias ? weights_->Get(spec.name + ".bias_hh").ptr() : nullptr;
    } else {
      b.weight = &weights_->Get(spec.name + ".weight");
      if (spec.bias) b.bias = &weights_->Get(spec.name + ".bias");
    }
    layers_.emplace(spec.name, std::move(b));
  }
}

const DfNet::Bound& DfNet::At(const std::string& name) const {
  auto it = layers_.find(name);
  if (it == layers_.end())
    throw ShapeError("network: no layer named '" + name + "'");
  return it->second;
}

NetState DfNet::NewState() const {
  NetState s;
  s.erb_conv0 = ConvHistory(At("enc.erb_conv0").spec);
  s.df_conv0 = ConvHistory(At("enc.df_conv0").spec);
  s.hidden.assign(static_cast<std::size_t>(config().gru_hidden), 0.0f);
  return s;
}

std::vector<float> DfNet::Conv1(const std::string& name,
                                std::span<const float> in) const {
  const Bound& l = At(name);
  const LayerSpec& s = l.spec;
  if (in.size() != static_cast<std::size_t>(s.in_channels) * s.in_freq)
    throw ShapeError("layer '" + name + "': input has " +
                     std::to_string(in.size()) + " values");
  std::vector<float> out(static_cast<std::size_t>(s.out_channels) * s.out_freq);
  const float* bias = l.bias ? l.bias->ptr() : nullptr;
  if (s.kind == LayerKind::kTConv) {
    TConvFrame(s, l.weight->ptr(), bias, in.data(), out.data());
  } else {
    const ConvTap tap{in.data(), static_cast<std::size_t>(s.in_freq)};
    ConvFrame(s, l.weight->ptr(), bias, std::span<const ConvTap>(&tap, 1),
              out.data(), static_cast<std::size_t>(s.out_freq));
  }
  return out;
}

std::vector<float> DfNet::Separable(const std::string& name,
                                    std::span<const float> in) const {
  auto out = Conv1(name + ".pw", Conv1(name + ".dw", in));
  ApplyActivation(Activation::kRelu, out);
  return out;
}

std::vector<float> DfNet::Linear(const std::string& name,
                                 std::span<const float> in, bool relu) const {
  const Bound& l = At(name);
  std::vector<float> out(static_cast<std::size_t>(l.spec.out_channels));
  GroupedLinear(l.spec, l.weight->ptr(), l.bias ? l.bias->ptr() : nullptr, in,
                out);
  if (relu) ApplyActivation(Activation::kRelu, out);
  return out;
}

std::vector<float> DfNet::EmbedTail(std::span<const float> e3,
                                    std::span<const float> c3,
                                    std::span<float> hidden) const {
  const auto c_emb = Linear("enc.df_fc_emb", c3, true);
  std::vector<float> cat(e3.begin(), e3.end());
  cat.insert(cat.end(), c_emb.begin(), c_emb.end());
  const auto x = Linear("enc.emb_fc", cat, true);
  GruStep(At("enc.gru").spec, At("enc.gru").gru, x, hidden);
  return {hidden.begin(), hidden.end()};
}

EncoderOutput DfNet::Encode(NetState& state, std::span<const float> erb_feat,
                            std::span<const float> df_feat) const {
  EncoderOutput enc;
  {
    const Bound& l = At("enc.erb_conv0");
    enc.e0.resize(static_cast<std::size_t>(l.spec.out_channels) * l.spec.out_freq);
    state.erb_conv0.Step(l.spec, l.weight->ptr(), l.bias->ptr(), erb_feat, enc.e0);
    ApplyActivation(Activation::kRelu, enc.e0);
  }
  enc.e1 = Separable("enc.erb_conv1", enc.e0);
  enc.e2 = Separable("enc.erb_conv2", enc.e1);
  enc.e3 = Separable("enc.erb_conv3", enc.e2);
  {
    const Bound& l = At("enc.df_conv0");
    enc.c0.resize(static_cast<std::size_t>(l.spec.out_channels) * l.spec.out_freq);
    state.df_conv0.Step(l.spec, l.weight->ptr(), l.bias->ptr(), df_feat, enc.c0);
    ApplyActivation(Activation::kRelu, enc.c0);
  }
  const auto c1 = Separable("enc.df_conv1", enc.c0);
  const auto c2 = Separable("enc.df_conv2", c1);
  const auto c3 = Separable("enc.df_conv3", c2);
  enc.emb = EmbedTail(enc.e3, c3, state.hidden);
  return enc;
}

std::vector<float> DfNet::DecodeErb(const EncoderOutput& enc) const {
  auto x = Linear("erb_dec.fc", enc.emb, true);
  AddInto(x, Conv1("erb_dec.conv3p", enc.e3));
  auto d = Separable("erb_dec.convt3", x);
  AddInto(d, Conv1("erb_dec.conv2p", enc.e2));
  d = Separable("erb_dec.convt2", d);
  AddInto(d, Conv1("erb_dec.conv1p", enc.e1));
  d = Separable("erb_dec.convt1", d);
  AddInto(d, Conv1("erb_dec.conv0p", enc.e0));
  auto gains = Conv1("erb_dec.conv0_out", d);
  ApplyActivation(Activation::kSigmoid, gains);
  return gains;
}

DfCoefSet<float> DfNet::DecodeDf(const EncoderOutput& enc) const {
  const int order = config().df.order;
  const int nb = config().df.n_df_bins;
  const auto h = Linear("df_dec.fc", enc.emb, true);
  const auto o = Linear("df_dec.out", h, false);
  const auto p = Conv1("df_dec.convp", enc.c0);  // [2N][F_df]
  DfCoefSet<float> coefs(order, nb);
  for (int i = 0; i < order; ++i) {
    const float* pr = p.data() + static_cast<std::size_t>(2 * i) * nb;
    const float* pi = pr + nb;
    for (int f = 0; f < nb; ++f) {
      const std::size_t k = (static_cast<std::size_t>(f) * order + i) * 2;
      coefs.at(i, f) = {o[k] + pr[f], o[k + 1] + pi[f]};
    }
  }
  return coefs;
}

NetOutput DfNet::Step(NetState& state, std::span<const float> erb_feat,
                      std::span<const float> df_feat) const {
  const EncoderOutput enc = Encode(state, erb_feat, df_feat);
  return {DecodeErb(enc), DecodeDf(enc)};
}

Tensor DfNet::SeparableClip(const std::string& name, const Tensor& in) const {
  const Bound& dw = At(name + ".dw");
  const Bound& pw = At(name + ".pw");
  Tensor y = ConvOffline(pw.spec, *pw.weight, pw.bias,
                         ConvOffline(dw.spec, *dw.weight, dw.bias, in));
  ReluTensor(y);
  return y;
}

std::vector<NetOutput> DfNet::ForwardClip(const Tensor& erb_feats,
                                          const Tensor& df_feats) const {
  const auto& cfg = config();
  const auto b = static_cast<std::size_t>(cfg.n_bands);
  const auto fd = static_cast<std::size_t>(cfg.df.n_df_bins);
  if (erb_feats.rank() != 2 || erb_feats.dim(1) != b)
    throw ShapeError("network: erb clip must be [T][" + std::to_string(b) + "]");
  const std::size_t frames = erb_feats.dim(0);
  if (df_feats.rank() != 3 || df_feats.dim(0) != frames || df_feats.dim(1) != 2 ||
      df_feats.dim(2) != fd)
    throw ShapeError("network: df clip must be [T][2][" + std::to_string(fd) + "]");

  // Rearrange inputs to [C][T][F].
  Tensor erb_in({1, frames, b}, std::vector<float>(erb_feats.data().begin(),
                                                   erb_feats.data().end()));
  Tensor df_in({2, frames, fd});
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t c = 0; c < 2; ++c)
      std::copy_n(df_feats.ptr() + (t * 2 + c) * fd, fd,
                  df_in.ptr() + (c * frames + t) * fd);

  const Bound& ec = At("enc.erb_conv0");
  Tensor e0 = ConvOffline(ec.spec, *ec.weight, ec.bias, erb_in);
  ReluTensor(e0);
  const Tensor e1 = SeparableClip("enc.erb_conv1", e0);
  const Tensor e2 = SeparableClip("enc.erb_conv2", e1);
  const Tensor e3 = SeparableClip("enc.erb_conv3", e2);
  const Bound& dc = At("enc.df_conv0");
  Tensor c0 = ConvOffline(dc.spec, *dc.weight, dc.bias, df_in);
  ReluTensor(c0);
  const Tensor c3 = SeparableClip(
      "enc.df_conv3", SeparableClip("enc.df_conv2", SeparableClip("enc.df_conv1", c0)));

  std::vector<float> hidden(static_cast<std::size_t>(cfg.gru_hidden), 0.0f);
  std::vector<NetOutput> out;
  out.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    EncoderOutput enc;
    enc.e0 = FrameOf(e0, t);
    enc.e1 = FrameOf(e1, t);
    enc.e2 = FrameOf(e2, t);
    enc.e3 = FrameOf(e3, t);
    enc.c0 = FrameOf(c0, t);
    enc.emb = EmbedTail(enc.e3, FrameOf(c3, t), hidden);
    out.push_back({DecodeErb(enc), DecodeDf(enc)});
  }
  return out;
}

}  // namespace dfn
