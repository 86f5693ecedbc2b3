// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Compressed spectral losses, evaluated as metrics (no gradients).

#pragma once

#include <span>
#include <vector>

#include "dfn/key_values.hpp"
#include "dfn/stft.hpp"

namespace dfn {

struct LossConfig {
  double c = 0.3;
  double lambda_spec = 1e3;
  double lambda_mr = 5e2;
  std::vector<double> mr_windows_ms = {5.0, 10.0, 20.0, 40.0};
  int sample_rate = 48000;
  // Resolution of the single-resolution term when computed from signals.
  double spec_window_ms = 20.0;

  void Validate() const;
  void Apply(const KeyValues& kv);
};

// |X|^c e^{j arg X}; zero at zero magnitude.
template <typename T>
std::complex<T> CompressComplex(std::complex<T> x, double c) {
  const double mag = std::abs(std::complex<double>(x));
  if (mag == 0.0) return {};
  return std::complex<T>(std::complex<double>(x) * std::pow(mag, c - 1.0));
}

// sum | |Y|^c - |S|^c |^2 + sum | |Y|^c e^{j phi_Y} - |S|^c e^{j phi_S} |^2
// over frames and bins.
double SpecLoss(const Spectrogram<float>& y, const Spectrogram<float>& s, double c);
double SpecLoss(const Spectrogram<double>& y, const Spectrogram<double>& s, double c);

// SpecLoss summed over the STFT resolutions in cfg.mr_windows_ms.
double MrSpecLoss(std::span<const float> y, std::span<const float> s,
                  const LossConfig& cfg = {});

struct LossReport {
  double spec = 0.0;
  double mr = 0.0;
  double combined = 0.0;  // lambda_spec * spec + lambda_mr * mr
};

LossReport CombinedLoss(const Spectrogram<float>& y_spec,
                        const Spectrogram<float>& s_spec,
                        std::span<const float> y, std::span<const float> s,
                        const LossConfig& cfg = {});
// Spectrograms taken at cfg.spec_window_ms.
LossReport CombinedLoss(std::span<const float> y, std::span<const float> s,
                        const LossConfig& cfg = {});

}  // namespace dfn
