// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/loss.hpp"

#include <cmath>

namespace dfn {

namespace {

template <typename T>
double SpecLossImpl(const Spectrogram<T>& y, const Spectrogram<T>& s, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("loss: c must be in (0, 1]");
  if (y.size() != s.size())
    throw ShapeError("loss: frame counts differ (" + std::to_string(y.size()) +
                     " vs " + std::to_string(s.size()) + ")");
  double mag = 0.0, cplx = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto& yb = y[k].bins;
    const auto& sb = s[k].bins;
    if (yb.size() != sb.size())
      throw ShapeError("loss: bin counts differ at frame " + std::to_string(k));
    for (std::size_t f = 0; f < yb.size(); ++f) {
      const auto yc = CompressComplex(std::complex<double>(yb[f]), c);
      const auto sc = CompressComplex(std::complex<double>(sb[f]), c);
      const double d = std::abs(yc) - std::abs(sc);
      mag += d * d;
      cplx += std::norm(yc - sc);
    }
  }
  return mag + cplx;
}

Spectrogram<double> StftOfSignal(std::span<const float> x, double window_ms,
                                 int sample_rate) {
  const std::vector<double> xd(x.begin(), x.end());
  return StftOffline<double>(std::span<const double>(xd), window_ms, sample_rate);
}

void CheckLengths(std::span<const float> y, std::span<const float> s) {
  if (y.size() != s.size())
    throw ShapeError("loss: signal lengths differ (" + std::to_string(y.size()) +
                     " vs " + std::to_string(s.size()) + ")");
}

}  // namespace

void LossConfig::Validate() const {
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("loss: c must be in (0, 1]");
  if (lambda_spec < 0.0 || lambda_mr < 0.0)
    throw ConfigError("loss: weights must be non-negative");
  for (double w : mr_windows_ms)
    if (!IsSupportedLossWindow(w))
      throw ConfigError("loss: unsupported window " + FormatNumber(w) + " ms");
  if (!IsSupportedLossWindow(spec_window_ms))
    throw ConfigError("loss: unsupported spec window");
}

void LossConfig::Apply(const KeyValues& kv) {
  c = kv.GetDouble("c", c);
  lambda_spec = kv.GetDouble("lambda_spec", lambda_spec);
  lambda_mr = kv.GetDouble("lambda_mr", lambda_mr);
  sample_rate = static_cast<int>(kv.GetInt("sample_rate", sample_rate));
  spec_window_ms = kv.GetDouble("spec_window_ms", spec_window_ms);
  if (kv.Has("mr_windows_ms")) {
    mr_windows_ms.clear();
    for (int w : kv.GetIntList("mr_windows_ms")) mr_windows_ms.push_back(w);
  }
}

double SpecLoss(const Spectrogram<float>& y, const Spectrogram<float>& s, double c) {
  return SpecLossImpl(y, s, c);
}
double SpecLoss(const Spectrogram<double>& y, const Spectrogram<double>& s, double c) {
  return SpecLossImpl(y, s, c);
}

double MrSpecLoss(std::span<const float> y, std::span<const float> s,
                  const LossConfig& cfg) {
  cfg.Validate();
  CheckLengths(y, s);
  double total = 0.0;
  for (double w : cfg.mr_windows_ms)
    total += SpecLossImpl(StftOfSignal(y, w, cfg.sample_rate),
                          StftOfSignal(s, w, cfg.sample_rate), cfg.c);
  return total;
}

LossReport CombinedLoss(const Spectrogram<float>& y_spec,
                        const Spectrogram<float>& s_spec,
                        std::span<const float> y, std::span<const float> s,
                        const LossConfig& cfg) {
  LossReport r;
  r.spec = SpecLoss(y_spec, s_spec, cfg.c);
  r.mr = cfg.lambda_mr == 0.0 ? 0.0 : MrSpecLoss(y, s, cfg);
  r.combined = cfg.lambda_spec * r.spec + cfg.lambda_mr * r.mr;
  return r;
}

LossReport CombinedLoss(std::span<const float> y, std::span<const float> s,
                        const LossConfig& cfg) {
  cfg.Validate();
  CheckLengths(y, s);
  LossReport r;
  r.spec = SpecLossImpl(StftOfSignal(y, cfg.spec_window_ms, cfg.sample_rate),
                        StftOfSignal(s, cfg.spec_window_ms, cfg.sample_rate), cfg.c);
  r.mr = MrSpecLoss(y, s, cfg);
  r.combined = cfg.lambda_spec * r.spec + cfg.lambda_mr * r.mr;
  return r;
}

}  // namespace dfn
