// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/model_config.hpp"

#include <numeric>

namespace dfn {

namespace {

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

int AsInt(const KeyValues& kv, const std::string& key, int def) {
  return static_cast<int>(kv.GetInt(key, def));
}

}  // namespace

const std::vector<std::string>& ModelConfig::Keys() {
  static const std::vector<std::string> keys = {
      "sample_rate",   "window_len",   "hop_len",       "fft_len",
      "lookahead",     "df_order",     "f_df",          "n_df_bins",
      "n_bands",       "erb_weighting", "erb_edges",    "conv_channels",
      "gru_hidden",    "n_groups",     "df_hidden",     "df_out_groups",
      "norm_tau",      "erb_norm_scale"};
  return keys;
}

void ModelConfig::Apply(const KeyValues& kv) {
  stft.sample_rate = AsInt(kv, "sample_rate", stft.sample_rate);
  stft.window_len = AsInt(kv, "window_len", stft.window_len);
  stft.hop_len = AsInt(kv, "hop_len", kv.Has("window_len") && !kv.Has("hop_len")
                                          ? stft.window_len / 2
                                          : stft.hop_len);
  stft.fft_len = AsInt(kv, "fft_len", kv.Has("window_len") && !kv.Has("fft_len")
                                          ? stft.window_len
                                          : stft.fft_len);
  stft.lookahead_frames = AsInt(kv, "lookahead", stft.lookahead_frames);
  df.lookahead = stft.lookahead_frames;
  df.order = AsInt(kv, "df_order", df.order);
  df.f_df = kv.GetDouble("f_df", df.f_df);
  const bool geometry_changed = kv.Has("f_df") || kv.Has("sample_rate") ||
                                kv.Has("window_len") || kv.Has("fft_len");
  df.n_df_bins = AsInt(kv, "n_df_bins",
                       geometry_changed ? DfConfig::BinsFor(df.f_df, stft)
                                        : df.n_df_bins);
  n_bands = AsInt(kv, "n_bands", n_bands);
  if (auto w = kv.Get("erb_weighting")) erb_weighting = ParseErbWeighting(*w);
  if (kv.Has("erb_edges")) erb_edges = kv.GetIntList("erb_edges");
  conv_channels = AsInt(kv, "conv_channels", conv_channels);
  gru_hidden = AsInt(kv, "gru_hidden", gru_hidden);
  n_groups = AsInt(kv, "n_groups", n_groups);
  df_hidden = AsInt(kv, "df_hidden", df_hidden);
  df_out_groups = AsInt(kv, "df_out_groups", df_out_groups);
  norm_tau = kv.GetDouble("norm_tau", norm_tau);
  erb_norm_scale = kv.GetDouble("erb_norm_scale", erb_norm_scale);
}

ModelConfig ModelConfig::FromMetadata(const KeyValues& kv) {
  ModelConfig cfg;
  cfg.Apply(kv);
  cfg.Validate();
  return cfg;
}

KeyValues ModelConfig::ToMetadata() const {
  KeyValues kv;
  kv.Set("sample_rate", stft.sample_rate);
  kv.Set("window_len", stft.window_len);
  kv.Set("hop_len", stft.hop_len);
  kv.Set("fft_len", stft.fft_len);
  kv.Set("lookahead", stft.lookahead_frames);
  kv.Set("df_order", df.order);
  kv.Set("f_df", df.f_df);
  kv.Set("n_df_bins", df.n_df_bins);
  kv.Set("n_bands", n_bands);
  kv.Set("erb_weighting", ToString(erb_weighting));
  kv.Set("erb_edges", JoinInts(Filterbank().band_edges()));
  kv.Set("conv_channels", conv_channels);
  kv.Set("gru_hidden", gru_hidden);
  kv.Set("n_groups", n_groups);
  kv.Set("df_hidden", df_hidden);
  kv.Set("df_out_groups", df_out_groups);
  kv.Set("norm_tau", norm_tau);
  kv.Set("erb_norm_scale", erb_norm_scale);
  return kv;
}

ErbFilterbank ModelConfig::Filterbank() const {
  if (erb_edges.empty()) return BuildFilterbank(stft, n_bands, erb_weighting);
  return ErbFilterbank(erb_edges, erb_weighting);
}

void ModelConfig::Validate() const {
  stft.Validate();
  df.Validate(stft);
  if (df.lookahead != stft.lookahead_frames)
    throw ConfigError("model: DF look-ahead and STFT look-ahead differ");
  if (n_bands < 4 || n_bands % 4 != 0)
    throw ConfigError("model: n_bands must be a positive multiple of 4");
  if (n_bands > stft.n_bins())
    throw ConfigError("model: n_bands exceeds the number of bins");
  if (df.n_df_bins % 2 != 0)
    throw ConfigError("model: n_df_bins must be even");
  if (df.n_df_bins % df_out_groups != 0)
    throw ConfigError("model: n_df_bins must be divisible by df_out_groups");
  if (norm_tau <= 0.0) throw ConfigError("model: norm_tau must be > 0");
  if (!erb_edges.empty()) {
    if (erb_edges.size() != static_cast<std::size_t>(n_bands) + 1 ||
        erb_edges.back() != stft.n_bins())
      throw ConfigError("model: erb_edges inconsistent with n_bands/n_bins");
    ErbFilterbank check(erb_edges, erb_weighting);
  }
  for (const auto& layer : ModelLayers(*this)) ValidateLayer(layer);
}

std::vector<LayerSpec> ModelLayers(const ModelConfig& cfg) {
  const int c = cfg.conv_channels;
  const int b = cfg.n_bands;
  const int fd = cfg.df.n_df_bins;
  const int h = cfg.gru_hidden;
  const int g = cfg.n_groups;
  const int taps2 = 2 * cfg.df.order;
  const int eb = cfg.erb_emb_freq();
  const int fd2 = cfg.df_emb_freq();

  std::vector<LayerSpec> layers;
  auto conv = [&](std::string name, LayerKind kind, int cin, int cout, int fin,
                  int kt, int kf, int groups, int stride, bool bias) {
    LayerSpec s;
    s.name = std::move(name);
    s.kind = kind;
    s.in_channels = cin;
    s.out_channels = cout;
    s.in_freq = fin;
    s.out_freq = kind == LayerKind::kTConv ? fin * stride
                                           : ConvOutFreq(fin, kf, stride);
    s.kernel_t = kt;
    s.kernel_f = kf;
    s.groups = groups;
    s.stride_f = stride;
    s.causal_context = kt - 1;
    s.bias = bias;
    layers.push_back(s);
  };
  auto act = [&](const std::string& name, Activation a, int size) {
    LayerSpec s;
    s.name = name + (a == Activation::kRelu ? ".relu" : ".sigmoid");
    s.kind = LayerKind::kActivation;
    s.in_channels = s.out_channels = size;
    s.activation = a;
    layers.push_back(s);
  };
  auto linear = [&](std::string name, int in, int out, int groups) {
    LayerSpec s;
    s.name = std::move(name);
    s.kind = LayerKind::kGroupedLinear;
    s.in_channels = in;
    s.out_channels = out;
    s.groups = groups;
    layers.push_back(s);
  };
  // Depthwise 1x3 (optionally transposed) followed by a pointwise 1x1 + ReLU.
  auto separable = [&](const std::string& name, int fin, int stride,
                       bool transposed) {
    conv(name + ".dw", transposed ? LayerKind::kTConv : LayerKind::kConv, c, c,
         fin, 1, 3, c, stride, false);
    const int fout = layers.back().out_freq;
    conv(name + ".pw", LayerKind::kConv, c, c, fout, 1, 1, 1, 1, true);
    act(name, Activation::kRelu, c * fout);
  };

  // Encoder, ERB path.
  conv("enc.erb_conv0", LayerKind::kConv, 1, c, b, 3, 3, 1, 1, true);
  act("enc.erb_conv0", Activation::kRelu, c * b);
  separable("enc.erb_conv1", b, 2, false);
  separable("enc.erb_conv2", b / 2, 2, false);
  separable("enc.erb_conv3", eb, 1, false);
  // Encoder, complex DF path (real and imaginary planes as two channels).
  conv("enc.df_conv0", LayerKind::kConv, 2, c, fd, 3, 3, 1, 1, true);
  act("enc.df_conv0", Activation::kRelu, c * fd);
  separable("enc.df_conv1", fd, 2, false);
  separable("enc.df_conv2", fd2, 1, false);
  separable("enc.df_conv3", fd2, 1, false);
  linear("enc.df_fc_emb", c * fd2, c * eb, g);
  act("enc.df_fc_emb", Activation::kRelu, c * eb);
  linear("enc.emb_fc", 2 * c * eb, h, g);
  act("enc.emb_fc", Activation::kRelu, h);
  {
    LayerSpec s;
    s.name = "enc.gru";
    s.kind = LayerKind::kGru;
    s.in_channels = h;
    s.out_channels = h;
    layers.push_back(s);
  }

  // ERB decoder: U-Net style upsampling with depthwise pathway convolutions.
  linear("erb_dec.fc", h, c * eb, g);
  act("erb_dec.fc", Activation::kRelu, c * eb);
  conv("erb_dec.conv3p", LayerKind::kPathwayConv, c, c, eb, 1, 1, c, 1, true);
  separable("erb_dec.convt3", eb, 1, false);
  conv("erb_dec.conv2p", LayerKind::kPathwayConv, c, c, eb, 1, 1, c, 1, true);
  separable("erb_dec.convt2", eb, 2, true);
  conv("erb_dec.conv1p", LayerKind::kPathwayConv, c, c, b / 2, 1, 1, c, 1,
       true);
  separable("erb_dec.convt1", b / 2, 2, true);
  conv("erb_dec.conv0p", LayerKind::kPathwayConv, c, c, b, 1, 1, c, 1, true);
  conv("erb_dec.conv0_out", LayerKind::kConv, c, 1, b, 1, 3, 1, 1, true);
  act("erb_dec.conv0_out", Activation::kSigmoid, b);

  // DF decoder; the output layer is grouped over neighbouring frequencies.
  linear("df_dec.fc", h, cfg.df_hidden, g);
  act("df_dec.fc", Activation::kRelu, cfg.df_hidden);
  linear("df_dec.out", cfg.df_hidden, fd * taps2, cfg.df_out_groups);
  conv("df_dec.convp", LayerKind::kPathwayConv, c, taps2, fd, 1, 1,
       std::gcd(c, taps2), 1, true);
  return layers;
}

}  // namespace dfn
