// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include "dfn/pipeline.hpp"
#include "dfn/weights.hpp"
#include "test_util.hpp"

using dfn::testing::Gen;

namespace {

const std::shared_ptr<const dfn::ModelWeights>& RandomNet() {
  static const auto w =
      std::make_shared<const dfn::ModelWeights>(dfn::RandomWeights(dfn::ModelConfig{}, 17));
  return w;
}

const std::shared_ptr<const dfn::ModelWeights>& IdentityNet() {
  static const auto w =
      std::make_shared<const dfn::ModelWeights>(dfn::IdentityWeights(dfn::ModelConfig{}));
  return w;
}

// Uncompensated hop-by-hop output.
std::vector<float> RunRaw(dfn::Enhancer& e, const std::vector<float>& x) {
  const auto hop = static_cast<std::size_t>(e.hop());
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i + hop <= x.size(); i += hop)
    e.Process(std::span(x).subspan(i, hop), std::span(out).subspan(i, hop));
  return out;
}

}  // namespace

TEST_CASE("pipeline: latency is window + look-ahead with a one-hop buffer") {
  dfn::Enhancer e(IdentityNet());
  CHECK(e.latency_samples() == 1920);
  CHECK(e.latency_samples() == (960 - 480) + 2 * 480 + 480);
}

TEST_CASE("pipeline: silence in, silence out") {
  dfn::Enhancer e(RandomNet());
  const std::vector<float> zeros(48000, 0.0f);
  for (float v : RunRaw(e, zeros)) REQUIRE(v == 0.0f);
}

TEST_CASE("pipeline: an impulse through identity weights is delayed by 1920") {
  dfn::Enhancer e(IdentityNet());
  std::vector<float> x(9600, 0.0f);
  x[1000] = 1.0f;
  const auto y = RunRaw(e, x);
  const auto peak = std::max_element(y.begin(), y.end(), [](float a, float b) {
    return std::abs(a) < std::abs(b);
  });
  CHECK(peak - y.begin() == 1000 + 1920);
  CHECK(*peak == doctest::Approx(1.0f).epsilon(1e-5));
  for (std::size_t n = 0; n < y.size(); ++n)
    if (n != 2920) CHECK(std::abs(y[n]) < 1e-5f);
}

TEST_CASE("pipeline: identity weights reproduce the input after compensation") {
  for (std::size_t n : {48000u, 12345u, 480u, 7u}) {
    const auto x = dfn::testing::SpeechLike(n, 48000.0, 5);
    const auto y = dfn::EnhanceSignal(IdentityNet(), x);
    REQUIRE(y.size() == n);
    CHECK(dfn::testing::MaxAbsDiff(x, y) < 1e-5);
  }
}

TEST_CASE("pipeline: outputs never depend on future input") {
  Gen g(51);
  const auto x = g.Noise<float>(48000, 0.1);
  dfn::Enhancer a(RandomNet()), b(RandomNet());
  const auto ya = RunRaw(a, x);
  for (std::size_t t0 : {4800u, 24000u, 33600u}) {
    auto xp = x;
    for (std::size_t n = t0; n < xp.size(); ++n) xp[n] += static_cast<float>(g.Normal());
    b.Reset();
    const auto yb = RunRaw(b, xp);
    bool changed_after = false;
    for (std::size_t n = 0; n < ya.size(); ++n) {
      if (n < t0) REQUIRE(ya[n] == yb[n]);
      else if (ya[n] != yb[n]) changed_after = true;
    }
    CHECK(changed_after);
  }
}

TEST_CASE("pipeline: processing is bit-identical across runs and resets") {
  Gen g(52);
  const auto x = g.Noise<float>(24000, 0.1);
  dfn::Enhancer a(RandomNet()), b(RandomNet());
  const auto ya = RunRaw(a, x);
  CHECK(RunRaw(b, x) == ya);
  a.Reset();
  CHECK(RunRaw(a, x) == ya);
}

TEST_CASE("pipeline: ten seconds through random weights stays finite") {
  Gen g(53);
  const auto x = g.Noise<float>(480000, 0.1);
  const auto y = dfn::EnhanceSignal(RandomNet(), x);
  REQUIRE(y.size() == x.size());
  for (float v : y) REQUIRE(std::isfinite(v));
}

TEST_CASE("pipeline: retained state is bounded by the architecture") {
  dfn::Enhancer e(RandomNet());
  const auto& cfg = e.config();
  const auto a = e.Audit();
  const std::size_t B = cfg.n_bands, Fd = cfg.df.n_df_bins, N = cfg.df.order;
  const std::size_t F = cfg.stft.n_bins();
  // Two past input frames per 3-frame conv, plus the GRU hidden vector.
  CHECK(a.conv_history <= 2 * (B + 2 * Fd) * 1);
  CHECK(a.network() <= 2 * (B + 2 * Fd) + static_cast<std::size_t>(cfg.gru_hidden));
  CHECK(a.gru_hidden == static_cast<std::size_t>(cfg.gru_hidden));
  CHECK(a.df_ring == N * Fd * 2);
  // l past full spectra are retained between frames.
  CHECK(a.gain_delay_line == cfg.df.lookahead * F * 2);
  CHECK(a.analysis == static_cast<std::size_t>(cfg.stft.window_len));
  CHECK(a.synthesis == static_cast<std::size_t>(cfg.stft.window_len));
  CHECK(a.output_buffer == static_cast<std::size_t>(cfg.stft.hop_len));
  CHECK(a.normalizer == B + Fd);
  // State does not grow with stream length.
  Gen g(54);
  RunRaw(e, g.Noise<float>(48000, 0.1));
  CHECK(e.Audit().total() == a.total());
}

TEST_CASE("pipeline: streaming from callbacks matches whole-signal enhancement") {
  Gen g(55);
  const auto x = g.Noise<float>(10007, 0.1);
  const auto ref = dfn::EnhanceSignal(RandomNet(), x);
  dfn::Enhancer e(RandomNet());
  std::size_t pos = 0;
  std::vector<float> got;
  dfn::EnhanceStream(
      e, x.size(),
      [&](std::span<float> buf) {
        // Deliver short, uneven reads.
        const std::size_t n = std::min({buf.size(), x.size() - pos, std::size_t{333}});
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(pos), n, buf.begin());
        pos += n;
        return n;
      },
      [&](std::span<const float> s) { got.insert(got.end(), s.begin(), s.end()); });
  CHECK(got == ref);

  const auto raw = dfn::EnhanceSignal(RandomNet(), x, {}, false);
  CHECK(raw.size() >= x.size());
}

TEST_CASE("pipeline: post-filter changes the output and keeps it finite") {
  Gen g(56);
  const auto x = g.Noise<float>(24000, 0.1);
  const auto plain = dfn::EnhanceSignal(RandomNet(), x);
  const auto filtered = dfn::EnhanceSignal(RandomNet(), x, {true, 0.02f});
  CHECK(plain != filtered);
  for (float v : filtered) REQUIRE(std::isfinite(v));
  dfn::Enhancer e(RandomNet(), {true, 0.02f});
  CHECK(e.options().post_filter);
  CHECK_THROWS_AS(dfn::Enhancer(RandomNet(), {true, -1.0f}), dfn::ConfigError);
}

TEST_CASE("pipeline: chunk sizes and frames are checked") {
  dfn::Enhancer e(RandomNet());
  std::vector<float> in(479), out(480);
  CHECK_THROWS_AS(e.Process(in, out), dfn::ShapeError);
  std::vector<float> in2(480), out2(481);
  CHECK_THROWS_AS(e.Process(in2, out2), dfn::ShapeError);
  CHECK_THROWS_AS(e.EnhanceFrame(dfn::SpectralFrame<float>(100)), dfn::ShapeError);
}

TEST_CASE("feature normalizer: smoothing constant and initial statistics") {
  const dfn::ModelConfig cfg;
  dfn::FeatureNormalizer norm(cfg);
  CHECK(norm.alpha() == doctest::Approx(std::exp(-480.0 / 48000.0)));
  // A -60 dB first band equals its initial mean.
  std::vector<float> erb(32, -60.0f);
  norm.NormalizeErb(erb);
  CHECK(std::abs(erb[0]) < 1e-6f);
  CHECK(erb[31] == doctest::Approx(30.0f / 40.0f * norm.alpha()).epsilon(1e-4));
  std::vector<std::complex<float>> bins(100, {0.0f, 0.0f});
  std::vector<float> out(200, 1.0f);
  norm.NormalizeDf(bins, out);
  for (float v : out) CHECK(v == 0.0f);
}
