// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Streaming STFT analysis and overlap-add synthesis.
//
// Both sides use a periodic square-root Hann window at 50% overlap, so the
// squared window sums to one and analysis followed by synthesis reproduces the
// input delayed by window_len - hop_len samples. Forward FFT is unnormalized,
// inverse is scaled by 1/fft_len.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dfn/error.hpp"
#include "dfn/fft.hpp"

namespace dfn {

struct StftConfig {
  int sample_rate = 48000;
  int window_len = 960;
  int hop_len = 480;
  int fft_len = 960;
  int lookahead_frames = 2;

  // 50% overlap profile for a window expressed in milliseconds.
  static StftConfig ForWindowMs(double window_ms, int sample_rate = 48000) {
    StftConfig cfg;
    cfg.sample_rate = sample_rate;
    const double samples = window_ms * 1e-3 * sample_rate;
    cfg.window_len = static_cast<int>(std::lround(samples));
    if (std::abs(samples - cfg.window_len) > 1e-9)
      throw ConfigError("stft: window of " + std::to_string(window_ms) +
                        " ms is not an integer number of samples");
    cfg.hop_len = cfg.window_len / 2;
    cfg.fft_len = cfg.window_len;
    return cfg;
  }

  int n_bins() const { return fft_len / 2 + 1; }
  double frames_per_second() const {
    return static_cast<double>(sample_rate) / hop_len;
  }
  // Window length plus the look-ahead frames, in samples.
  int algorithmic_delay() const {
    return window_len + lookahead_frames * hop_len;
  }

  void Validate() const {
    if (sample_rate <= 0) throw ConfigError("stft: sample_rate must be > 0");
    if (window_len < 2 || window_len % 2 != 0)
      throw ConfigError("stft: window_len must be even and >= 2, got " +
                        std::to_string(window_len));
    if (hop_len * 2 != window_len)
      throw ConfigError("stft: hop_len must be window_len / 2");
    if (fft_len != window_len)
      throw ConfigError("stft: fft_len must equal window_len");
    if (lookahead_frames < 0)
      throw ConfigError("stft: lookahead_frames must be >= 0");
  }

  bool operator==(const StftConfig&) const = default;
};

template <typename T>
struct SpectralFrame {
  std::vector<std::complex<T>> bins;
  std::int64_t frame_index = 0;

  SpectralFrame() = default;
  explicit SpectralFrame(std::size_t n_bins, std::int64_t index = 0)
      : bins(n_bins), frame_index(index) {}
};

template <typename T>
using Spectrogram = std::vector<SpectralFrame<T>>;

// Periodic square-root Hann: w(n) = sin(pi n / N).
template <typename T = float>
std::vector<T> MakeWindow(const StftConfig& cfg) {
  if (cfg.window_len < 2 || cfg.window_len % 2 != 0)
    throw ConfigError("window: window_len must be even and >= 2, got " +
                      std::to_string(cfg.window_len));
  std::vector<T> w(static_cast<std::size_t>(cfg.window_len));
  for (std::size_t n = 0; n < w.size(); ++n)
    w[n] = static_cast<T>(std::sin(std::numbers::pi * static_cast<double>(n) /
                                   static_cast<double>(w.size())));
  return w;
}

template <typename T>
class StftAnalyzer {
 public:
  explicit StftAnalyzer(const StftConfig& cfg)
      : cfg_((cfg.Validate(), cfg)),
        window_(MakeWindow<T>(cfg)),
        fft_(static_cast<std::size_t>(cfg.fft_len)),
        buffer_(static_cast<std::size_t>(cfg.window_len), T(0)),
        windowed_(static_cast<std::size_t>(cfg.fft_len)) {}

  const StftConfig& config() const { return cfg_; }
  std::int64_t frames_emitted() const { return frame_counter_; }

  // Consumes exactly hop_len samples and returns the spectrum of the newest
  // window_len samples. The ring starts zero-filled.
  SpectralFrame<T> Step(std::span<const T> samples) {
    SpectralFrame<T> frame(static_cast<std::size_t>(cfg_.n_bins()));
    Step(samples, frame);
    return frame;
  }

  void Step(std::span<const T> samples, SpectralFrame<T>& frame) {
    const auto hop = static_cast<std::size_t>(cfg_.hop_len);
    if (samples.size() != hop)
      throw ShapeError("stft analysis: expected " + std::to_string(hop) +
                       " samples, got " + std::to_string(samples.size()));
    std::copy(buffer_.begin() + hop, buffer_.end(), buffer_.begin());
    std::copy(samples.begin(), samples.end(), buffer_.end() - hop);
    for (std::size_t n = 0; n < buffer_.size(); ++n)
      windowed_[n] = buffer_[n] * window_[n];
    frame.bins.resize(static_cast<std::size_t>(cfg_.n_bins()));
    fft_.Forward(windowed_, frame.bins);
    frame.frame_index = frame_counter_++;
  }

  void Reset() {
    std::fill(buffer_.begin(), buffer_.end(), T(0));
    frame_counter_ = 0;
  }

  std::size_t state_size() const { return buffer_.size(); }

 private:
  StftConfig cfg_;
  std::vector<T> window_;
  RealFft<T> fft_;
  std::vector<T> buffer_;
  std::vector<T> windowed_;
  std::int64_t frame_counter_ = 0;
};

template <typename T>
class StftSynthesizer {
 public:
  explicit StftSynthesizer(const StftConfig& cfg)
      : cfg_((cfg.Validate(), cfg)),
        window_(MakeWindow<T>(cfg)),
        fft_(static_cast<std::size_t>(cfg.fft_len)),
        accumulator_(static_cast<std::size_t>(cfg.window_len), T(0)),
        time_(static_cast<std::size_t>(cfg.fft_len)) {}

  const StftConfig& config() const { return cfg_; }
  std::int64_t frames_consumed() const { return frame_counter_; }

  std::vector<T> Step(const SpectralFrame<T>& frame) {
    std::vector<T> out(static_cast<std::size_t>(cfg_.hop_len));
    Step(frame, out);
    return out;
  }

  void Step(const SpectralFrame<T>& frame, std::span<T> out) {
    const auto hop = static_cast<std::size_t>(cfg_.hop_len);
    if (frame.bins.size() != static_cast<std::size_t>(cfg_.n_bins()))
      throw ShapeError("stft synthesis: expected " +
                       std::to_string(cfg_.n_bins()) + " bins, got " +
                       std::to_string(frame.bins.size()));
    if (out.size() != hop)
      throw ShapeError("stft synthesis: output chunk must be hop_len");
    fft_.Inverse(frame.bins, time_);
    const T scale = T(1) / static_cast<T>(cfg_.fft_len);
    for (std::size_t n = 0; n < accumulator_.size(); ++n)
      accumulator_[n] += time_[n] * scale * window_[n];
    std::copy(accumulator_.begin(), accumulator_.begin() + hop, out.begin());
    std::copy(accumulator_.begin() + hop, accumulator_.end(),
              accumulator_.begin());
    std::fill(accumulator_.end() - hop, accumulator_.end(), T(0));
    ++frame_counter_;
  }

  void Reset() {
    std::fill(accumulator_.begin(), accumulator_.end(), T(0));
    frame_counter_ = 0;
  }

  std::span<const T> accumulator() const { return accumulator_; }
  std::size_t state_size() const { return accumulator_.size(); }

 private:
  StftConfig cfg_;
  std::vector<T> window_;
  RealFft<T> fft_;
  std::vector<T> accumulator_;
  std::vector<T> time_;
  std::int64_t frame_counter_ = 0;
};

// Number of frames StftOffline produces for `n` samples.
inline std::size_t OfflineFrameCount(std::size_t n, const StftConfig& cfg) {
  const auto hop = static_cast<std::size_t>(cfg.hop_len);
  const std::size_t warmup = static_cast<std::size_t>(cfg.window_len) / hop - 1;
  return (n + hop - 1) / hop + warmup;
}

// Batch STFT equal to streaming the signal, zero-padded to a whole number of
// hops plus window_len - hop_len trailing zeros, through StftAnalyzer.
template <typename T>
Spectrogram<T> StftOffline(std::span<const T> signal, const StftConfig& cfg) {
  if (signal.empty()) throw ConfigError("stft: signal is empty");
  StftAnalyzer<T> analyzer(cfg);
  const auto hop = static_cast<std::size_t>(cfg.hop_len);
  const std::size_t frames = OfflineFrameCount(signal.size(), cfg);
  Spectrogram<T> out(frames);
  std::vector<T> chunk(hop);
  for (std::size_t k = 0; k < frames; ++k) {
    std::fill(chunk.begin(), chunk.end(), T(0));
    const std::size_t start = k * hop;
    if (start < signal.size()) {
      const std::size_t len = std::min(hop, signal.size() - start);
      std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(start), len,
                  chunk.begin());
    }
    analyzer.Step(chunk, out[k]);
  }
  return out;
}

inline bool IsSupportedLossWindow(double window_ms) {
  return window_ms == 5.0 || window_ms == 10.0 || window_ms == 20.0 ||
         window_ms == 40.0;
}

// Offline STFT at one of the loss resolutions {5, 10, 20, 40} ms.
template <typename T>
Spectrogram<T> StftOffline(std::span<const T> signal, double window_ms,
                           int sample_rate = 48000) {
  if (!IsSupportedLossWindow(window_ms))
    throw ConfigError("stft: unsupported window of " +
                      std::to_string(window_ms) + " ms");
  return StftOffline(signal, StftConfig::ForWindowMs(window_ms, sample_rate));
}

// Overlap-add inverse of StftOffline. The result is delay-compensated and
// trimmed to `length` samples.
template <typename T>
std::vector<T> IstftOffline(const Spectrogram<T>& frames, const StftConfig& cfg,
                            std::size_t length) {
  StftSynthesizer<T> synth(cfg);
  const auto hop = static_cast<std::size_t>(cfg.hop_len);
  const std::size_t delay = static_cast<std::size_t>(cfg.window_len) - hop;
  std::vector<T> raw(frames.size() * hop);
  for (std::size_t k = 0; k < frames.size(); ++k)
    synth.Step(frames[k], std::span<T>(raw).subspan(k * hop, hop));
  std::vector<T> out(length, T(0));
  for (std::size_t n = 0; n < length && n + delay < raw.size(); ++n)
    out[n] = raw[n + delay];
  return out;
}

}  // namespace dfn
