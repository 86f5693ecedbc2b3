// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "dfn/complexity.hpp"

namespace dfn {

namespace {

constexpr float kDfNormEps = 1e-10f;

std::vector<float> Linspace(float a, float b, std::size_t n) {
  std::vector<float> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<float>(i) / static_cast<float>(n - 1);
  return v;
}

}  // namespace

FeatureNormalizer::FeatureNormalizer(const ModelConfig& cfg)
    : alpha_(static_cast<float>(
          std::exp(-static_cast<double>(cfg.stft.hop_len) /
                   (cfg.stft.sample_rate * cfg.norm_tau)))),
      erb_scale_(static_cast<float>(cfg.erb_norm_scale)),
      erb_mean_init_(Linspace(-60.0f, -90.0f, static_cast<std::size_t>(cfg.n_bands))),
      df_power_init_(Linspace(1e-3f, 1e-4f, static_cast<std::size_t>(cfg.df.n_df_bins))) {
  Reset();
}

void FeatureNormalizer::Reset() {
  erb_mean_ = erb_mean_init_;
  df_power_ = df_power_init_;
}

void FeatureNormalizer::NormalizeErb(std::span<float> erb_db) {
  if (erb_db.size() != erb_mean_.size())
    throw ShapeError("normalizer: expected " + std::to_string(erb_mean_.size()) +
                     " ERB bands");
  for (std::size_t b = 0; b < erb_db.size(); ++b) {
    erb_mean_[b] = alpha_ * erb_mean_[b] + (1.0f - alpha_) * erb_db[b];
    erb_db[b] = (erb_db[b] - erb_mean_[b]) * erb_scale_;
  }
}

void FeatureNormalizer::NormalizeDf(std::span<const std::complex<float>> bins,
                                    std::span<float> out) {
  const std::size_t nb = df_power_.size();
  if (bins.size() < nb || out.size() != 2 * nb)
    throw ShapeError("normalizer: DF feature size mismatch");
  for (std::size_t f = 0; f < nb; ++f) {
    df_power_[f] = alpha_ * df_power_[f] + (1.0f - alpha_) * std::norm(bins[f]);
    const float inv = 1.0f / std::sqrt(df_power_[f] + kDfNormEps);
    out[f] = bins[f].real() * inv;
    out[nb + f] = bins[f].imag() * inv;
  }
}

Enhancer::Enhancer(std::shared_ptr<const ModelWeights> weights,
                   EnhancerOptions options)
    : net_(std::move(weights)),
      options_(options),
      fb_(config().Filterbank()),
      norm_(config()),
      net_state_(net_.NewState()),
      df_state_(config().df),
      analyzer_(config().stft),
      synth_(config().stft),
      delay_line_(static_cast<std::size_t>(config().df.lookahead) + 1,
                  std::vector<std::complex<float>>(
                      static_cast<std::size_t>(config().stft.n_bins()))),
      out_buffer_(static_cast<std::size_t>(config().stft.hop_len), 0.0f),
      scratch_(static_cast<std::size_t>(config().stft.hop_len), 0.0f) {
  if (options_.beta < 0.0f) throw ConfigError("enhancer: beta must be >= 0");
}

int Enhancer::latency_samples() const {
  const auto& s = config().stft;
  return (s.window_len - s.hop_len) + config().df.lookahead * s.hop_len +
         static_cast<int>(out_buffer_.size());
}

SpectralFrame<float> Enhancer::EnhanceFrame(const SpectralFrame<float>& x) {
  const auto& cfg = config();
  const auto n_bins = static_cast<std::size_t>(cfg.stft.n_bins());
  if (x.bins.size() != n_bins)
    throw ShapeError("enhancer: frame has " + std::to_string(x.bins.size()) +
                     " bins, expected " + std::to_string(n_bins));

  std::vector<float> erb(static_cast<std::size_t>(cfg.n_bands));
  Compress(x.bins, fb_, erb);
  norm_.NormalizeErb(erb);
  std::vector<float> df(2 * static_cast<std::size_t>(cfg.df.n_df_bins));
  norm_.NormalizeDf(x.bins, df);

  last_ = net_.Step(net_state_, erb, df);
  if (options_.post_filter) PostFilterInPlace(last_.gains, options_.beta);

  // Gains predicted at frame k apply to X(k - l).
  const std::size_t slots = delay_line_.size();
  std::copy(x.bins.begin(), x.bins.end(), delay_line_[delay_head_].begin());
  const auto& delayed = delay_line_[(delay_head_ + 1) % slots];
  delay_head_ = (delay_head_ + 1) % slots;

  SpectralFrame<float> y_g(n_bins, x.frame_index - cfg.df.lookahead);
  std::copy(delayed.begin(), delayed.end(), y_g.bins.begin());
  ApplyGainsInPlace(y_g.bins, InterpolateGains(last_.gains, fb_));

  df_state_.Push(x.bins);
  SpectralFrame<float> y(n_bins, y_g.frame_index);
  ApplyDeepFilter<float>(df_state_, y_g.bins, last_.coefs, y.bins);
  ++frames_;
  return y;
}

void Enhancer::Process(std::span<const float> in, std::span<float> out) {
  if (in.size() != out_buffer_.size() || out.size() != out_buffer_.size())
    throw ShapeError("enhancer: chunks must be hop_len = " +
                     std::to_string(out_buffer_.size()) + " samples");
  analyzer_.Step(in, x_frame_);
  const SpectralFrame<float> y = EnhanceFrame(x_frame_);
  synth_.Step(y, scratch_);
  std::copy(out_buffer_.begin(), out_buffer_.end(), out.begin());
  std::swap(out_buffer_, scratch_);
}

void Enhancer::Reset() {
  norm_.Reset();
  net_state_.Reset();
  df_state_.Reset();
  analyzer_.Reset();
  synth_.Reset();
  for (auto& f : delay_line_) std::fill(f.begin(), f.end(), std::complex<float>(0));
  delay_head_ = 0;
  std::fill(out_buffer_.begin(), out_buffer_.end(), 0.0f);
  frames_ = 0;
}

StateAudit Enhancer::Audit() const {
  StateAudit a;
  a.analysis = analyzer_.state_size();
  a.synthesis = synth_.state_size();
  a.output_buffer = out_buffer_.size();
  a.normalizer = norm_.state_size();
  a.conv_history = net_state_.conv_state_size();
  a.gru_hidden = net_state_.hidden.size();
  a.df_ring = 2 * df_state_.state_size();
  a.gain_delay_line = 2 * (delay_line_.size() - 1) * delay_line_[0].size();
  return a;
}

void EnhanceStream(Enhancer& enhancer, std::size_t n_samples,
                   const SampleSource& source, const SampleSink& sink,
                   bool compensate_delay) {
  const auto hop = static_cast<std::size_t>(enhancer.hop());
  std::size_t skip = compensate_delay ? static_cast<std::size_t>(enhancer.latency_samples()) : 0;
  std::vector<float> in(hop), out(hop);
  std::size_t written = 0;
  bool input_done = false;
  while (written < n_samples) {
    std::size_t got = 0;
    if (!input_done) {
      while (got < hop) {
        const std::size_t n = source(std::span<float>(in).subspan(got));
        if (n == 0) {
          input_done = true;
          break;
        }
        got += n;
      }
    }
    std::fill(in.begin() + static_cast<std::ptrdiff_t>(got), in.end(), 0.0f);
    enhancer.Process(in, out);
    std::size_t begin = std::min(skip, hop);
    skip -= begin;
    const std::size_t len = std::min(hop - begin, n_samples - written);
    if (len > 0) {
      sink(std::span<const float>(out).subspan(begin, len));
      written += len;
    }
  }
}

std::vector<float> EnhanceSignal(std::shared_ptr<const ModelWeights> weights,
                                 std::span<const float> signal,
                                 EnhancerOptions options,
                                 bool compensate_delay) {
  Enhancer enhancer(std::move(weights), options);
  std::vector<float> out;
  out.reserve(signal.size());
  std::size_t pos = 0;
  EnhanceStream(
      enhancer, signal.size(),
      [&](std::span<float> buf) {
        const std::size_t n = std::min(buf.size(), signal.size() - pos);
        std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(pos), n, buf.begin());
        pos += n;
        return n;
      },
      [&](std::span<const float> chunk) {
        out.insert(out.end(), chunk.begin(), chunk.end());
      },
      compensate_delay);
  return out;
}

BenchReport RunBenchmark(std::shared_ptr<const ModelWeights> weights,
                         double duration_s, int runs, std::uint64_t seed,
                         EnhancerOptions options) {
  if (duration_s <= 0.0) throw ConfigError("bench: duration must be > 0");
  if (runs < 1) throw ConfigError("bench: runs must be >= 1");
  const ModelConfig& cfg = weights->config();
  const auto hop = static_cast<std::size_t>(cfg.stft.hop_len);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * cfg.stft.sample_rate));
  const std::size_t frames = n / hop;

  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 0.1f);
  std::vector<float> noise(frames * hop);
  for (float& v : noise) v = dist(rng);

  BenchReport r;
  r.audio_seconds = static_cast<double>(frames * hop) / cfg.stft.sample_rate;
  r.frames_processed = static_cast<std::int64_t>(frames);
  const auto cx = CountParamsMacs(*weights);
  r.params = cx.params;
  r.macs_per_second = cx.macs_per_second;

  std::vector<float> out(hop);
  double wall_total = 0.0;
  for (int run = 0; run < runs; ++run) {
    Enhancer enhancer(weights, options);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < frames; ++k)
      enhancer.Process(std::span<const float>(noise).subspan(k * hop, hop), out);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    wall_total += wall;
    r.run_rtfs.push_back(wall / r.audio_seconds);
  }
  r.wall_seconds = wall_total / runs;
  r.rtf = r.wall_seconds / r.audio_seconds;
  return r;
}

}  // namespace dfn
