// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include "dfn/augment.hpp"
#include "dfn/fft.hpp"
#include "test_util.hpp"

using dfn::testing::Gen;

namespace {

constexpr double kSr = 48000.0;

std::vector<float> Sine(std::size_t n, double hz, double amp = 0.5) {
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / kSr));
  return x;
}

double Rms(std::span<const float> x, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  to = std::min(to, x.size());
  double e = 0.0;
  for (std::size_t i = from; i < to; ++i) e += static_cast<double>(x[i]) * x[i];
  return std::sqrt(e / static_cast<double>(to - from));
}

// Mean periodogram value over bins [lo, hi).
double BandDensity(const std::vector<double>& psd, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t k = lo; k < hi; ++k) s += psd[k];
  return s / static_cast<double>(hi - lo);
}

std::vector<double> Periodogram(const std::vector<float>& x) {
  dfn::RealFft<double> fft(x.size());
  std::vector<double> xd(x.begin(), x.end());
  std::vector<std::complex<double>> spec(fft.bins());
  fft.Forward(xd, spec);
  std::vector<double> p(spec.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(spec[k]);
  return p;
}

dfn::AugmentSpec Plain() { return dfn::AugmentSpec::None(); }

}  // namespace

TEST_CASE("draws: portable and reproducible") {
  auto a = dfn::PairRng(5, 3), b = dfn::PairRng(5, 3), c = dfn::PairRng(5, 4);
  const double ua = dfn::UniformDouble(a), ub = dfn::UniformDouble(b), uc = dfn::UniformDouble(c);
  CHECK(ua == ub);
  CHECK(ua != uc);
  dfn::Rng r(1);
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = dfn::UniformDouble(r, -2.0, 3.0);
    REQUIRE((u >= -2.0 && u < 3.0));
    const double g = dfn::GaussianDouble(r);
    mean += g;
    var += g * g;
  }
  CHECK(std::abs(mean / n) < 0.05);
  CHECK(var / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("biquad: identity and lowpass response") {
  const auto x = dfn::testing::SumOfSines(4800, kSr, 20000.0, 3);
  CHECK(dfn::Biquad{}.Process(x) == x);
  const auto lp = dfn::Biquad::Lowpass(1000.0, 0.707, kSr);
  CHECK(lp.IsStable());
  CHECK(lp.MagnitudeAt(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lp.MagnitudeAt(1000.0 / kSr) == doctest::Approx(0.707).epsilon(0.01));
  CHECK(lp.MagnitudeAt(10000.0 / kSr) < 0.02);
  const auto low = lp.Process(Sine(9600, 100.0));
  const auto high = lp.Process(Sine(9600, 12000.0));
  CHECK(Rms(low, 4800) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.01));
  CHECK(Rms(high, 4800) < 0.01 * Rms(low, 4800));
  const auto pk = dfn::Biquad::Peaking(2000.0, 1.0, 6.0, kSr);
  CHECK(20.0 * std::log10(pk.MagnitudeAt(2000.0 / kSr)) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(pk.MagnitudeAt(0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("biquad: random filters are stable for 100 seeds") {
  Gen g(61);
  const auto x = g.Noise<float>(48000, 0.3);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    dfn::Rng rng(seed);
    dfn::Biquad f;
    const auto y = dfn::BiquadRandom(x, rng, &f);
    for (double c : {f.b1, f.b2, f.a1, f.a2}) REQUIRE(std::abs(c) <= 0.375);
    REQUIRE(f.IsStable());
    std::vector<float> imp(4800, 0.0f);
    imp[0] = 1.0f;
    const auto h = f.Process(imp);
    REQUIRE(std::abs(h.back()) < 1e-6f);
    for (float v : y) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("gain: decibel scaling") {
  const auto x = Sine(1000, 440.0);
  const auto half = dfn::Gain(x, -6.02);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(half[i] == doctest::Approx(0.5 * x[i]).epsilon(1e-3));
  CHECK(dfn::Gain(x, 0.0) == x);
  CHECK(dfn::SignalPower(dfn::Gain(x, 10.0)) == doctest::Approx(10.0 * dfn::SignalPower(x)).epsilon(1e-5));
}

TEST_CASE("equalizer: a single band boosts its centre") {
  const dfn::EqBand band{3000.0, 1.0, 6.0};
  const auto y = dfn::Equalize(Sine(19200, 3000.0), std::span(&band, 1), kSr);
  CHECK(Rms(y, 9600) / Rms(Sine(19200, 3000.0), 9600) == doctest::Approx(std::pow(10.0, 0.3)).epsilon(0.01));
}

TEST_CASE("resample: length and near-transparent round trip") {
  const std::size_t n = 48000;
  const auto x = dfn::testing::SumOfSines(n, kSr, 8000.0, 9);
  for (double r : {0.9, 1.1, 1.05, 2.0, 0.5}) {
    const auto y = dfn::Resample(x, r);
    CHECK(y.size() == static_cast<std::size_t>(std::floor(n / r)));
    const auto z = dfn::Resample(y, 1.0 / r);
    // Compare the interior, away from edge effects.
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 2000; i + 2000 < std::min(z.size(), n); ++i) {
      err += std::pow(static_cast<double>(z[i]) - x[i], 2);
      ref += static_cast<double>(x[i]) * x[i];
    }
    CHECK(10.0 * std::log10(err / ref) < -40.0);
  }
  CHECK_THROWS_AS(dfn::Resample(x, 0.0), dfn::ConfigError);
}

TEST_CASE("colored noise: unit RMS, zero mean and spectral slope") {
  const std::size_t n = 1 << 16;
  for (double e : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    dfn::Rng rng(static_cast<std::uint64_t>(e * 10 + 100));
    const auto x = dfn::ColoredNoise(n, e, rng);
    REQUIRE(x.size() == n);
    CHECK(Rms(x) == doctest::Approx(1.0).epsilon(1e-5));
    double mean = 0.0;
    for (float v : x) mean += v;
    CHECK(std::abs(mean / n) < 1e-4);
    const auto psd = Periodogram(x);
    // Density across octaves: log2 ratio between octaves 8 apart.
    const std::size_t bins = psd.size();
    const double lo = BandDensity(psd, bins / 256, bins / 128);
    const double hi = BandDensity(psd, bins / 2, bins);
    const double octaves = std::log2((bins * 0.75) / (bins * 1.5 / 256));
    const double slope = std::log2(hi / lo) / octaves;
    CHECK(std::abs(slope - e) < 0.15);
  }
}

TEST_CASE("rir: synthetic decay, estimate and faster target decay") {
  dfn::Rng rng(62);
  const auto h = dfn::SyntheticRir(0.5, kSr, 48000, rng);
  CHECK(h[0] == 1.0f);
  for (float v : h) REQUIRE(std::abs(v) <= 1.0f);
  CHECK(dfn::EstimateRt60(h, kSr) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(dfn::DecayRir(h, 0.0, kSr) == h);
  const auto d = dfn::DecayRir(h, 60.0, kSr);
  CHECK(d[0] == h[0]);
  // 120 dB/s natural + 60 dB/s extra = 180 dB/s.
  CHECK(dfn::EstimateRt60(d, kSr) == doctest::Approx(60.0 / 180.0).epsilon(0.1));
  const std::size_t tail = 4800;
  CHECK(Rms(d, tail) < 0.5 * Rms(h, tail));
  for (std::size_t i = 0; i < h.size(); ++i) REQUIRE(std::abs(d[i]) <= std::abs(h[i]));
}

TEST_CASE("convolution: matches direct sum") {
  Gen g(63);
  const auto a = g.Noise<float>(37), b = g.Noise<float>(11);
  const auto y = dfn::FftConvolve(a, b);
  REQUIRE(y.size() == 47);
  for (std::size_t n = 0; n < y.size(); ++n) {
    double ref = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (n >= k && n - k < a.size()) ref += static_cast<double>(a[n - k]) * b[k];
    CHECK(y[n] == doctest::Approx(ref).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("clipping: bisection reaches the requested SNR") {
  const auto x = dfn::testing::SpeechLike(48000, kSr, 7);
  for (double target : {0.0, 3.0, 10.0, 20.0}) {
    const auto c = dfn::ClipToSnr(x, target);
    CHECK(c.reached);
    // Error power within 12% of |s|^2 / 10^(target / 10).
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err += std::pow(static_cast<double>(x[i]) - c.signal[i], 2);
    const double want = dfn::SignalPower(x) * x.size() / std::pow(10.0, target / 10.0);
    CHECK(std::abs(err / want - 1.0) <= 0.12);
    CHECK(dfn::SnrDb(x, c.signal) == doctest::Approx(c.snr_db));
    for (float v : c.signal) REQUIRE(std::abs(v) <= c.threshold);
  }
  const auto sine = dfn::ClipToSnr(Sine(4800, 440.0), 10.0);
  CHECK(std::abs(sine.snr_db - 10.0) <= 0.5);
  const auto id = dfn::ClipToSnr(x, std::numeric_limits<double>::infinity());
  CHECK(id.identity);
  CHECK(id.signal == x);
  CHECK_THROWS_AS(dfn::ClipToSnr(x, 25.0), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::ClipToSnr(x, -1.0), dfn::ConfigError);
}

TEST_CASE("mix: no noise and no transforms leaves noisy equal to target") {
  const auto s = dfn::testing::SpeechLike(24000, kSr, 8);
  dfn::Rng rng(1);
  const auto p = dfn::Mix(s, {}, nullptr, std::numeric_limits<double>::infinity(), Plain(), rng);
  CHECK(p.noisy == p.target);
  CHECK(p.target == s);
  CHECK_THROWS_AS(dfn::Mix(s, {}, nullptr, std::numeric_limits<double>::quiet_NaN(), Plain(), rng),
                  dfn::ConfigError);
}

TEST_CASE("mix: requested SNR holds on the summed components") {
  Gen g(64);
  const auto s = dfn::testing::SpeechLike(48000, kSr, 9);
  const auto n = g.Noise<float>(30000, 0.2);
  dfn::Rng rrir(2);
  const auto h = dfn::SyntheticRir(0.3, kSr, 9600, rrir);
  for (double snr : {-5.0, 0.0, 10.0, 20.0}) {
    auto rng = dfn::PairRng(3, static_cast<std::uint64_t>(snr + 10));
    const auto p = dfn::Mix(s, n, &h, snr, dfn::AugmentSpec{}, rng);
    REQUIRE(p.noisy.size() == p.target.size());
    const double got = 10.0 * std::log10(dfn::SignalPower(p.speech_component) /
                                          dfn::SignalPower(p.noise_component));
    CHECK(std::abs(got - snr) < 0.1);
    for (std::size_t i = 0; i < p.noisy.size(); ++i)
      REQUIRE(p.noisy[i] == doctest::Approx(p.distorted_speech[i] + p.noise_component[i]).epsilon(1e-6));
    CHECK(!p.LogText().empty());
  }
}

TEST_CASE("mix: clipping distorts the input, never the target") {
  const auto s = dfn::testing::SpeechLike(24000, kSr, 10);
  auto spec = Plain();
  spec.p_clipping = 1.0;
  spec.clip_snr_min = spec.clip_snr_max = 5.0;
  dfn::Rng rng(4);
  const auto p = dfn::Mix(s, {}, nullptr, std::numeric_limits<double>::infinity(), spec, rng);
  CHECK(p.target == s);
  CHECK(p.noisy != p.target);
  CHECK(dfn::SnrDb(p.target, p.noisy) == doctest::Approx(5.0).epsilon(0.1));
  CHECK(p.LogText().find("noisy.clip") != std::string::npos);
}

TEST_CASE("mix: seeded, bounded by headroom and logged") {
  Gen g(65);
  const auto s = dfn::testing::SpeechLike(24000, kSr, 11);
  auto loud = s;
  for (float& v : loud) v *= 20.0f;
  const auto n = g.Noise<float>(24000, 1.0);
  dfn::AugmentSpec spec;
  spec.p_resample = 0.5;
  auto r1 = dfn::PairRng(9, 1), r2 = dfn::PairRng(9, 1);
  const auto a = dfn::Mix(loud, n, nullptr, 0.0, spec, r1);
  const auto b = dfn::Mix(loud, n, nullptr, 0.0, spec, r2);
  CHECK(a.noisy == b.noisy);
  CHECK(a.target == b.target);
  CHECK(a.LogText() == b.LogText());
  for (const auto* v : {&a.noisy, &a.target})
    for (float x : *v) REQUIRE(std::abs(x) <= spec.headroom * (1 + 1e-6));
  CHECK(a.LogText().find("headroom") != std::string::npos);
}

TEST_CASE("augment spec: validation and overrides") {
  dfn::AugmentSpec spec;
  spec.Validate();
  spec.Apply(dfn::KeyValues::Parse("p_clipping = 0.25\ngain_db_max = 3\n"));
  CHECK(spec.p_clipping == 0.25);
  CHECK(spec.gain_db_max == 3.0);
  dfn::AugmentSpec bad;
  bad.p_gain = 1.5;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
  bad = {};
  bad.clip_snr_max = 30.0;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
  bad = {};
  bad.resample_min = 1.2;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
  const auto s = dfn::testing::SpeechLike(480, kSr, 1);
  dfn::Rng rng(1);
  CHECK_THROWS_AS(dfn::Mix(std::vector<float>(480, 0.0f), s, nullptr, 0.0, Plain(), rng), dfn::ConfigError);
  CHECK_THROWS_AS(dfn::Mix(s, std::vector<float>(480, 0.0f), nullptr, 0.0, Plain(), rng), dfn::ConfigError);
}
