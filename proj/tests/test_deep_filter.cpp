// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include "dfn/deep_filter.hpp"
#include "test_util.hpp"

using dfn::testing::Gen;
using cd = std::complex<double>;

namespace {

dfn::StftConfig Tiny() {
  dfn::StftConfig s;
  s.window_len = s.fft_len = 16;
  s.hop_len = 8;
  return s;
}

dfn::DfCoefSet<double> RandomCoefs(Gen& g, int order, int bins) {
  dfn::DfCoefSet<double> c(order, bins);
  for (auto& v : c.coefs) v = {g.Normal(), g.Normal()};
  return c;
}

}  // namespace

TEST_CASE("df config: bin count and validation") {
  const dfn::StftConfig stft;
  CHECK(dfn::DfConfig::BinsFor(5000.0, stft) == 100);
  CHECK(dfn::DfConfig::BinsFor(5010.0, stft) == 101);
  const auto cfg = dfn::DfConfig::For(stft);
  CHECK(cfg.order == 5);
  CHECK(cfg.lookahead == 2);
  CHECK(cfg.n_df_bins == 100);
  CHECK_THROWS_AS(dfn::DfConfig::For(stft, 0), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::DfConfig::For(stft, 3, 3), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::DfConfig::For(stft, 5, -1), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::DfConfig::For(stft, 5, 2, 30000.0), dfn::ConfigError);
}

TEST_CASE("apply_df: identity taps return the input exactly") {
  const dfn::StftConfig stft;
  const auto cfg = dfn::DfConfig::For(stft);
  dfn::DfState<float> state(cfg);
  const auto id = dfn::DfCoefSet<float>::Identity(cfg);
  Gen g(21);
  std::vector<dfn::SpectralFrame<float>> frames;
  for (int k = 0; k < 12; ++k) {
    dfn::SpectralFrame<float> x(481, k);
    for (auto& b : x.bins) b = {static_cast<float>(g.Normal()), static_cast<float>(g.Normal())};
    frames.push_back(x);
    state.Push(x.bins);
    // Unity first-stage gains: y_g is X(k - l).
    const dfn::SpectralFrame<float> y_g =
        k >= cfg.lookahead ? frames[k - cfg.lookahead] : dfn::SpectralFrame<float>(481);
    const auto y = dfn::ApplyDeepFilter(state, y_g, id);
    for (int f = 0; f < 481; ++f) CHECK(std::abs(y.bins[f] - y_g.bins[f]) <= 1e-6f);
  }
}

TEST_CASE("apply_df: zero taps clear the DF band and keep the rest bit-exact") {
  const auto cfg = dfn::DfConfig::For(dfn::StftConfig{});
  dfn::DfState<float> state(cfg);
  dfn::DfCoefSet<float> zero(cfg.order, cfg.n_df_bins);
  Gen g(22);
  for (int k = 0; k < 6; ++k) {
    dfn::SpectralFrame<float> x(481), y_g(481);
    for (auto& b : x.bins) b = {static_cast<float>(g.Normal()), 1.0f};
    for (auto& b : y_g.bins) b = {static_cast<float>(g.Normal()), -2.0f};
    state.Push(x.bins);
    const auto y = dfn::ApplyDeepFilter(state, y_g, zero);
    for (int f = 0; f < cfg.n_df_bins; ++f) CHECK(y.bins[f] == std::complex<float>(0));
    for (int f = cfg.n_df_bins; f < 481; ++f) CHECK(y.bins[f] == y_g.bins[f]);
  }
}

TEST_CASE("apply_df: matches a brute-force sum on N=3, F_df=4") {
  const auto stft = Tiny();
  dfn::DfConfig cfg{3, 1, 0.0, 4};
  cfg.Validate(stft);
  Gen g(23);
  for (int trial = 0; trial < 50; ++trial) {
    dfn::DfState<double> state(cfg);
    std::vector<std::vector<cd>> history;  // newest last
    const int steps = g.Int(1, 7);
    for (int k = 0; k < steps; ++k) {
      history.push_back(g.ComplexNoise<double>(9));
      state.Push(history.back());
    }
    const auto c = RandomCoefs(g, 3, 4);
    const auto y_g = g.ComplexNoise<double>(9);
    std::vector<cd> out(9);
    dfn::ApplyDeepFilter<double>(state, y_g, c, out);
    const int k = steps - 1;
    for (int f = 0; f < 4; ++f) {
      cd ref = 0.0;
      for (int i = 0; i < 3; ++i)
        if (k - i >= 0) ref += c.at(i, f) * history[k - i][f];
      CHECK(std::abs(out[f] - ref) < 1e-9);
    }
    for (int f = 4; f < 9; ++f) CHECK(out[f] == y_g[f]);
  }
}

TEST_CASE("apply_df: linear in X for fixed C and in C for fixed X") {
  const auto stft = Tiny();
  dfn::DfConfig cfg{3, 1, 0.0, 4};
  Gen g(24);
  const double a = 0.37, b = -1.9;
  const auto c1 = RandomCoefs(g, 3, 4), c2 = RandomCoefs(g, 3, 4);
  dfn::DfState<double> s1(cfg), s2(cfg), s12(cfg);
  for (int k = 0; k < 5; ++k) {
    const auto x1 = g.ComplexNoise<double>(9), x2 = g.ComplexNoise<double>(9);
    std::vector<cd> x12(9);
    for (int f = 0; f < 9; ++f) x12[f] = a * x1[f] + b * x2[f];
    s1.Push(x1);
    s2.Push(x2);
    s12.Push(x12);
  }
  std::vector<cd> y_g(9, 0.0), o1(9), o2(9), o12(9);
  dfn::ApplyDeepFilter<double>(s1, y_g, c1, o1);
  dfn::ApplyDeepFilter<double>(s2, y_g, c1, o2);
  dfn::ApplyDeepFilter<double>(s12, y_g, c1, o12);
  for (int f = 0; f < 4; ++f) CHECK(std::abs(o12[f] - (a * o1[f] + b * o2[f])) < 1e-9);

  dfn::DfCoefSet<double> c12(3, 4);
  for (std::size_t i = 0; i < c12.coefs.size(); ++i)
    c12.coefs[i] = a * c1.coefs[i] + b * c2.coefs[i];
  dfn::ApplyDeepFilter<double>(s1, y_g, c1, o1);
  dfn::ApplyDeepFilter<double>(s1, y_g, c2, o2);
  dfn::ApplyDeepFilter<double>(s1, y_g, c12, o12);
  for (int f = 0; f < 4; ++f) CHECK(std::abs(o12[f] - (a * o1[f] + b * o2[f])) < 1e-9);
}

TEST_CASE("apply_df: dimension mismatches are errors") {
  dfn::DfConfig cfg{3, 1, 0.0, 4};
  dfn::DfState<double> state(cfg);
  std::vector<cd> y_g(9), out(9);
  CHECK_THROWS_AS(dfn::ApplyDeepFilter<double>(state, y_g, dfn::DfCoefSet<double>(2, 4), out),
                  dfn::ShapeError);
  std::vector<cd> short_out(8);
  CHECK_THROWS_AS(
      dfn::ApplyDeepFilter<double>(state, y_g, dfn::DfCoefSet<double>(3, 4), short_out),
      dfn::ShapeError);
  CHECK_THROWS_AS(state.Push(std::vector<cd>(3)), dfn::ShapeError);
}

TEST_CASE("df state: ring holds exactly `order` frames, zero-filled at start") {
  dfn::DfConfig cfg{3, 1, 0.0, 2};
  dfn::DfState<double> state(cfg);
  CHECK(state.state_size() == 6);
  for (int i = 0; i < 3; ++i) CHECK(state.Past(i)[0] == cd(0));
  for (int k = 1; k <= 5; ++k) state.Push(std::vector<cd>{cd(k), cd(-k)});
  CHECK(state.Past(0)[0] == cd(5));
  CHECK(state.Past(1)[0] == cd(4));
  CHECK(state.Past(2)[1] == cd(-3));
  state.Reset();
  CHECK(state.Past(0)[0] == cd(0));
}

TEST_CASE("post filter: values as printed") {
  CHECK(dfn::PostFilterGain(0.0f, 0.02f) == 0.0f);
  CHECK(dfn::PostFilterGain(1.0f, 0.02f) == doctest::Approx(1.02 / 2.02).epsilon(1e-6));
  CHECK(std::abs(dfn::PostFilterGain(1.0f, 0.02f) - 0.50495f) < 1e-4f);
  const double gp = 0.5 * std::sin(std::numbers::pi / 4);
  CHECK(dfn::PostFilterGain(0.5f, 0.02f) == doctest::Approx(1.02 * 0.5 / (1.02 + gp)).epsilon(1e-6));
  CHECK(std::abs(dfn::PostFilterGain(0.5f, 0.02f) - 0.37131f) < 1e-4f);
  CHECK_THROWS_AS(dfn::PostFilter(std::vector<float>{0.5f}, -0.1f), dfn::ConfigError);
}

TEST_CASE("post filter: maps [0,1] into [0,1] and fixes zero") {
  for (float beta : {0.0f, 0.02f, 0.5f, 1.0f}) {
    CHECK(dfn::PostFilterGain(0.0f, beta) == 0.0f);
    for (int i = 0; i <= 1000; ++i) {
      const float g = i / 1000.0f;
      const float o = dfn::PostFilterGain(g, beta);
      CHECK((o >= 0.0f && o <= 1.0f));
    }
  }
  std::vector<float> gains = {0.0f, 0.5f, 1.0f};
  const auto out = dfn::PostFilter(gains, 0.02f);
  dfn::PostFilterInPlace(gains, 0.02f);
  CHECK(out == gains);
}
