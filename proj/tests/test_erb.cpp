// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include "dfn/erb.hpp"
#include "test_util.hpp"

using dfn::testing::Gen;

namespace {

const dfn::ErbFilterbank& Default() {
  static const dfn::ErbFilterbank fb = dfn::BuildFilterbank(dfn::StftConfig{}, 32);
  return fb;
}

}  // namespace

TEST_CASE("erb scale: Glasberg-Moore formula and inverse") {
  CHECK(dfn::FreqToErb(0.0) == 0.0);
  CHECK(dfn::FreqToErb(1000.0) == doctest::Approx(9.265 * std::log(1.0 + 1000.0 / 226.25)));
  for (double f : {50.0, 440.0, 5000.0, 24000.0})
    CHECK(dfn::ErbToFreq(dfn::FreqToErb(f)) == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("filterbank: default 32 bands over 481 bins") {
  const auto& fb = Default();
  CHECK(fb.n_bands() == 32);
  CHECK(fb.n_bins() == 481);
  const auto& e = fb.band_edges();
  REQUIRE(e.size() == 33);
  CHECK(e.front() == 0);
  CHECK(e.back() == 481);
  int widest = 0;
  for (int b = 0; b < 32; ++b) {
    CHECK(e[b + 1] > e[b]);
    widest = std::max(widest, e[b + 1] - e[b]);
  }
  CHECK(e[1] - e[0] <= 2);
  CHECK(e[2] - e[1] <= 2);
  CHECK(e[32] - e[31] == widest);
}

TEST_CASE("filterbank: rows sum to one, columns are covered") {
  for (auto w : {dfn::ErbWeighting::kTriangular, dfn::ErbWeighting::kRectangular})
    for (int bands : {2, 8, 32, 100}) {
      const auto fb = dfn::BuildFilterbank(dfn::StftConfig{}, bands, w);
      for (int b = 0; b < bands; ++b) {
        double row = 0.0;
        for (int f = 0; f < fb.n_bins(); ++f) row += fb.weight(b, f);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-6));
      }
      for (int f = 0; f < fb.n_bins(); ++f) {
        float col = 0.0f;
        for (int b = 0; b < bands; ++b) col += fb.weight(b, f);
        CHECK(col > 0.0f);
      }
    }
}

TEST_CASE("filterbank: n_bands = F selects single bins") {
  dfn::StftConfig cfg;
  cfg.window_len = cfg.fft_len = 32;
  cfg.hop_len = 16;
  const auto fb = dfn::BuildFilterbank(cfg, cfg.n_bins());
  for (int b = 0; b < fb.n_bands(); ++b)
    for (int f = 0; f < fb.n_bins(); ++f) CHECK(fb.weight(b, f) == (b == f ? 1.0f : 0.0f));
}

TEST_CASE("filterbank: out-of-range band counts are rejected") {
  CHECK_THROWS_AS(dfn::BuildFilterbank(dfn::StftConfig{}, 1), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::BuildFilterbank(dfn::StftConfig{}, 482), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::ErbFilterbank({0, 3, 3, 10}, dfn::ErbWeighting::kTriangular),
                  dfn::ConfigError);
}

TEST_CASE("compress: floor, flat spectrum, tone support") {
  const auto& fb = Default();
  dfn::SpectralFrame<float> zero(481);
  for (float v : dfn::Compress(zero, fb)) CHECK(v == doctest::Approx(-100.0).epsilon(1e-6));

  dfn::SpectralFrame<float> flat(481);
  for (auto& b : flat.bins) b = {0.6f, 0.8f};
  for (float v : dfn::Compress(flat, fb)) CHECK(std::abs(v) < 1e-6);

  dfn::SpectralFrame<float> tone(481);
  const int m = 200;
  tone.bins[m] = 3.0f;
  const auto db = dfn::Compress(tone, fb);
  for (int b = 0; b < 32; ++b) {
    const bool touches = fb.weight(b, m) > 0.0f;
    CHECK((db[b] > -99.0f) == touches);
  }
  CHECK_THROWS_AS(dfn::Compress(dfn::SpectralFrame<float>(480), fb), dfn::ShapeError);
}

TEST_CASE("interpolate: unity, zero and indicator gains") {
  const auto& fb = Default();
  std::vector<float> ones(32, 1.0f), zeros(32, 0.0f);
  for (float g : dfn::InterpolateGains(ones, fb)) CHECK(g == 1.0f);
  for (float g : dfn::InterpolateGains(zeros, fb)) CHECK(g == 0.0f);
  for (int b = 0; b < 32; ++b) {
    std::vector<float> ind(32, 0.0f);
    ind[b] = 1.0f;
    const auto g = dfn::InterpolateGains(ind, fb);
    for (int f = 0; f < 481; ++f) {
      CHECK((g[f] > 0.0f) == (fb.weight(b, f) > 0.0f));
      CHECK((g[f] >= 0.0f && g[f] <= 1.0f));
    }
  }
  CHECK_THROWS_AS(dfn::InterpolateGains(std::vector<float>(31), fb), dfn::ShapeError);
}

TEST_CASE("interpolate: bounded, monotone, and re-aggregates constants exactly") {
  const auto& fb = Default();
  Gen g(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> gains(32);
    for (auto& v : gains) v = static_cast<float>(g.Uniform(0.0, 1.0));
    const auto bins = dfn::InterpolateGains(gains, fb);
    const float lo = *std::min_element(gains.begin(), gains.end());
    const float hi = *std::max_element(gains.begin(), gains.end());
    // (w * G) / w may round by one ulp.
    for (float v : bins) CHECK((v >= lo * (1 - 1e-7f) && v <= hi * (1 + 1e-7f)));
    auto raised = gains;
    raised[g.Int(0, 31)] += 0.1f;
    const auto bins2 = dfn::InterpolateGains(raised, fb);
    for (int f = 0; f < 481; ++f) CHECK(bins2[f] >= bins[f] * (1 - 1e-7f));
  }
  for (float c : {0.0f, 0.25f, 0.7f, 1.0f}) {
    const auto bins = dfn::InterpolateGains(std::vector<float>(32, c), fb);
    for (int b = 0; b < 32; ++b) {
      double agg = 0.0;
      for (int f = 0; f < 481; ++f) agg += fb.weight(b, f) * bins[f];
      CHECK(agg == doctest::Approx(c).epsilon(1e-6));
    }
  }
}

TEST_CASE("apply_gains: identity, zero, energy, phase and errors") {
  Gen g(12);
  dfn::SpectralFrame<float> x(481);
  for (auto& b : x.bins) b = {static_cast<float>(g.Normal()), static_cast<float>(g.Normal())};
  const auto same = dfn::ApplyGains(x, std::vector<float>(481, 1.0f));
  for (int f = 0; f < 481; ++f) CHECK(same.bins[f] == x.bins[f]);
  const auto zero = dfn::ApplyGains(x, std::vector<float>(481, 0.0f));
  for (const auto& b : zero.bins) CHECK(b == std::complex<float>(0));
  const auto half = dfn::ApplyGains(x, std::vector<float>(481, 0.5f));
  double ex = 0.0, eh = 0.0;
  for (int f = 0; f < 481; ++f) {
    ex += std::norm(x.bins[f]);
    eh += std::norm(half.bins[f]);
    CHECK(std::arg(half.bins[f]) == doctest::Approx(std::arg(x.bins[f])));
  }
  CHECK(eh == doctest::Approx(0.25 * ex).epsilon(1e-6));

  std::vector<float> bad(481, 1.0f);
  bad[3] = -0.1f;
  CHECK_THROWS_AS(dfn::ApplyGains(x, bad), dfn::ConfigError);
  bad[3] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(dfn::ApplyGains(x, bad), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::ApplyGains(x, std::vector<float>(480, 1.0f)), dfn::ShapeError);
}

TEST_CASE("apply_gains: output norm bounded by max gain") {
  const auto& fb = Default();
  Gen g(13);
  dfn::SpectralFrame<float> x(481);
  for (auto& b : x.bins) b = {static_cast<float>(g.Normal()), static_cast<float>(g.Normal())};
  std::vector<float> gains(32);
  for (auto& v : gains) v = static_cast<float>(g.Uniform(0.0, 0.8));
  const auto y = dfn::ApplyGains(x, dfn::InterpolateGains(gains, fb));
  double nx = 0.0, ny = 0.0;
  for (int f = 0; f < 481; ++f) {
    nx += std::norm(x.bins[f]);
    ny += std::norm(y.bins[f]);
  }
  CHECK(std::sqrt(ny) <= *std::max_element(gains.begin(), gains.end()) * std::sqrt(nx) + 1e-6);
}

TEST_CASE("weighting: names parse and round trip") {
  CHECK(dfn::ParseErbWeighting(dfn::ToString(dfn::ErbWeighting::kRectangular)) ==
        dfn::ErbWeighting::kRectangular);
  CHECK(dfn::ParseErbWeighting("triangular") == dfn::ErbWeighting::kTriangular);
  CHECK_THROWS_AS(dfn::ParseErbWeighting("mel"), dfn::ConfigError);
  const auto fb = dfn::BuildFilterbank(dfn::StftConfig{}, 32, dfn::ErbWeighting::kRectangular);
  const auto& e = fb.band_edges();
  const int b = 31;
  for (int f = e[b]; f < e[b + 1]; ++f)
    CHECK(fb.weight(b, f) == doctest::Approx(1.0 / (e[b + 1] - e[b])));
}
