// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// End-to-end streaming enhancement: STFT analysis, feature extraction,
// network, ERB gains, deep filtering and overlap-add synthesis.
//
// Delay budget at the default profile (48 kHz, 20 ms window, l = 2):
//   overlap-add                    window_len - hop_len   480
//   deep-filter look-ahead         l * hop_len            960
//   output hop buffer              hop_len                480
//   total                                                1920 samples

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dfn/deep_filter.hpp"
#include "dfn/erb.hpp"
#include "dfn/network.hpp"
#include "dfn/stft.hpp"
#include "dfn/weights.hpp"

namespace dfn {

// Exponential running statistics with alpha = exp(-hop / (sr * tau)).
// ERB features: (x_db - mean) * erb_norm_scale. DF features: X / sqrt(power)
// per bin, emitted as a real plane and an imaginary plane.
class FeatureNormalizer {
 public:
  explicit FeatureNormalizer(const ModelConfig& cfg);

  float alpha() const { return alpha_; }
  void NormalizeErb(std::span<float> erb_db);
  void NormalizeDf(std::span<const std::complex<float>> bins,
                   std::span<float> out);
  void Reset();
  std::size_t state_size() const { return erb_mean_.size() + df_power_.size(); }

 private:
  float alpha_;
  float erb_scale_;
  std::vector<float> erb_mean_, erb_mean_init_;
  std::vector<float> df_power_, df_power_init_;
};

struct EnhancerOptions {
  bool post_filter = false;
  float beta = kDefaultPostFilterBeta;
};

// Retained per-stream state, in floats (complex values count as two).
struct StateAudit {
  std::size_t analysis = 0;
  std::size_t synthesis = 0;
  std::size_t output_buffer = 0;
  std::size_t normalizer = 0;
  std::size_t conv_history = 0;
  std::size_t gru_hidden = 0;
  std::size_t df_ring = 0;
  std::size_t gain_delay_line = 0;

  std::size_t network() const { return conv_history + gru_hidden; }
  std::size_t total() const {
    return analysis + synthesis + output_buffer + normalizer + conv_history +
           gru_hidden + df_ring + gain_delay_line;
  }
};

class Enhancer {
 public:
  explicit Enhancer(std::shared_ptr<const ModelWeights> weights,
                    EnhancerOptions options = {});

  const ModelConfig& config() const { return net_.config(); }
  const EnhancerOptions& options() const { return options_; }
  int hop() const { return config().stft.hop_len; }
  // Sample offset between an input and its enhanced output.
  int latency_samples() const;

  // Consumes hop_len samples and emits hop_len samples.
  void Process(std::span<const float> in, std::span<float> out);

  // Consumes frame X(k) and returns the enhanced frame Y(k - l).
  SpectralFrame<float> EnhanceFrame(const SpectralFrame<float>& x);

  // Gains and coefficients of the last EnhanceFrame call.
  const NetOutput& last_output() const { return last_; }

  void Reset();
  StateAudit Audit() const;

 private:
  DfNet net_;
  EnhancerOptions options_;
  ErbFilterbank fb_;
  FeatureNormalizer norm_;
  NetState net_state_;
  DfState<float> df_state_;
  StftAnalyzer<float> analyzer_;
  StftSynthesizer<float> synth_;
  std::vector<std::vector<std::complex<float>>> delay_line_;  // l + 1 frames
  std::size_t delay_head_ = 0;
  std::vector<float> out_buffer_;
  std::vector<float> scratch_;
  NetOutput last_;
  std::int64_t frames_ = 0;
  SpectralFrame<float> x_frame_;
};

// Fills the span and returns the sample count written; 0 signals end of input.
using SampleSource = std::function<std::size_t(std::span<float>)>;
using SampleSink = std::function<void(std::span<const float>)>;

// Streams `n_samples` through the enhancer in hop-sized chunks with constant
// memory. With compensation, the first latency_samples() outputs are dropped
// and the tail is flushed with zeros so exactly n_samples are written,
// aligned to the input.
void EnhanceStream(Enhancer& enhancer, std::size_t n_samples,
                   const SampleSource& source, const SampleSink& sink,
                   bool compensate_delay = true);

std::vector<float> EnhanceSignal(std::shared_ptr<const ModelWeights> weights,
                                 std::span<const float> signal,
                                 EnhancerOptions options = {},
                                 bool compensate_delay = true);

struct BenchReport {
  double audio_seconds = 0.0;
  double wall_seconds = 0.0;  // mean over runs
  double rtf = 0.0;           // mean over runs
  std::vector<double> run_rtfs;
  std::int64_t frames_processed = 0;
  std::int64_t params = 0;
  double macs_per_second = 0.0;
};

// Streams seeded Gaussian noise through fresh pipelines in hop-sized chunks.
BenchReport RunBenchmark(std::shared_ptr<const ModelWeights> weights,
                         double duration_s, int runs, std::uint64_t seed,
                         EnhancerOptions options = {});

}  // namespace dfn
