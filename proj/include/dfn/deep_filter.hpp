// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Second-stage deep filtering: a per-bin complex FIR across the last `order`
// input frames, evaluated for the frame `lookahead` steps in the past.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dfn/error.hpp"
#include "dfn/stft.hpp"

namespace dfn {

struct DfConfig {
  int order = 5;
  int lookahead = 2;
  double f_df = 5000.0;
  int n_df_bins = 100;

  // n_df_bins = ceil(f_df / bin_hz).
  static int BinsFor(double f_df, const StftConfig& stft) {
    const double bin_hz = static_cast<double>(stft.sample_rate) / stft.fft_len;
    return static_cast<int>(std::ceil(f_df / bin_hz - 1e-9));
  }
  static DfConfig For(const StftConfig& stft, int order = 5, int lookahead = 2,
                      double f_df = 5000.0) {
    DfConfig cfg{order, lookahead, f_df, BinsFor(f_df, stft)};
    cfg.Validate(stft);
    return cfg;
  }

  void Validate(const StftConfig& stft) const {
    if (order < 1) throw ConfigError("df: order must be >= 1");
    if (lookahead < 0 || lookahead >= order)
      throw ConfigError("df: lookahead must satisfy 0 <= l < order");
    if (n_df_bins < 1 || n_df_bins > stft.n_bins())
      throw ConfigError("df: n_df_bins must be in [1, " +
                        std::to_string(stft.n_bins()) + "]");
  }

  bool operator==(const DfConfig&) const = default;
};

// Filter taps for one frame, laid out [tap][bin].
template <typename T>
struct DfCoefSet {
  int order = 0;
  int n_bins = 0;
  std::vector<std::complex<T>> coefs;

  DfCoefSet() = default;
  DfCoefSet(int order_, int n_bins_)
      : order(order_),
        n_bins(n_bins_),
        coefs(static_cast<std::size_t>(order_) * n_bins_) {}

  std::complex<T>& at(int tap, int bin) {
    return coefs[static_cast<std::size_t>(tap) * n_bins + bin];
  }
  const std::complex<T>& at(int tap, int bin) const {
    return coefs[static_cast<std::size_t>(tap) * n_bins + bin];
  }

  // Tap `lookahead` set to 1 + 0j, all others zero: passes X(k - l) through.
  static DfCoefSet Identity(const DfConfig& cfg) {
    DfCoefSet c(cfg.order, cfg.n_df_bins);
    for (int f = 0; f < cfg.n_df_bins; ++f) c.at(cfg.lookahead, f) = T(1);
    return c;
  }
};

// Ring of the last `order` unenhanced input frames restricted to the DF band.
// Slot 0 is the newest frame. Zero-filled at stream start.
template <typename T>
class DfState {
 public:
  explicit DfState(const DfConfig& cfg)
      : order_(cfg.order),
        n_bins_(cfg.n_df_bins),
        ring_(static_cast<std::size_t>(cfg.order) * cfg.n_df_bins) {}

  int order() const { return order_; }
  int n_bins() const { return n_bins_; }

  // Pushes the DF band of frame X(k); extra upper bins are ignored.
  void Push(std::span<const std::complex<T>> frame) {
    if (frame.size() < static_cast<std::size_t>(n_bins_))
      throw ShapeError("df: frame has fewer bins than the DF band");
    head_ = (head_ + order_ - 1) % order_;
    auto* slot = ring_.data() + static_cast<std::size_t>(head_) * n_bins_;
    for (int f = 0; f < n_bins_; ++f) slot[f] = frame[f];
  }

  // X(k - i) for the newest pushed frame k.
  const std::complex<T>* Past(int i) const {
    return ring_.data() +
           static_cast<std::size_t>((head_ + i) % order_) * n_bins_;
  }

  void Reset() {
    std::fill(ring_.begin(), ring_.end(), std::complex<T>(0));
    head_ = 0;
  }

  std::size_t state_size() const { return ring_.size(); }

 private:
  int order_;
  int n_bins_;
  std::vector<std::complex<T>> ring_;
  int head_ = 0;
};

// Y(k - l, f) = sum_i C(k, i, f) X(k - i, f) for f < n_df_bins, and the
// first-stage output y_g (already frame k - l) above the DF band.
template <typename T>
void ApplyDeepFilter(const DfState<T>& state, std::span<const std::complex<T>> y_g,
                     const DfCoefSet<T>& coefs, std::span<std::complex<T>> out) {
  if (coefs.order != state.order() || coefs.n_bins != state.n_bins())
    throw ShapeError("df: coefficient set is " + std::to_string(coefs.order) +
                     "x" + std::to_string(coefs.n_bins) + ", state is " +
                     std::to_string(state.order()) + "x" +
                     std::to_string(state.n_bins()));
  if (y_g.size() != out.size() || y_g.size() < static_cast<std::size_t>(state.n_bins()))
    throw ShapeError("df: frame size mismatch");
  const int nb = state.n_bins();
  for (int f = 0; f < nb; ++f) out[f] = std::complex<T>(0);
  for (int i = 0; i < state.order(); ++i) {
    const std::complex<T>* x = state.Past(i);
    const std::complex<T>* c = coefs.coefs.data() + static_cast<std::size_t>(i) * nb;
    for (int f = 0; f < nb; ++f) out[f] += c[f] * x[f];
  }
  for (std::size_t f = static_cast<std::size_t>(nb); f < y_g.size(); ++f)
    out[f] = y_g[f];
}

template <typename T>
SpectralFrame<T> ApplyDeepFilter(const DfState<T>& state,
                                 const SpectralFrame<T>& y_g,
                                 const DfCoefSet<T>& coefs) {
  SpectralFrame<T> out(y_g.bins.size(), y_g.frame_index);
  ApplyDeepFilter<T>(state, y_g.bins, coefs, out.bins);
  return out;
}

// Sine-shaped post-filter on first-stage band gains:
//   G' = G sin(pi/2 G);  G <- (1 + beta) G / (1 + beta + G').
float PostFilterGain(float gain, float beta);
std::vector<float> PostFilter(std::span<const float> gains, float beta);
void PostFilterInPlace(std::span<float> gains, float beta);

inline constexpr float kDefaultPostFilterBeta = 0.02f;

}  // namespace dfn
