// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <sstream>

#include "dfn/loss.hpp"
#include "dfn/schedule.hpp"
#include "test_util.hpp"

using dfn::testing::Gen;

namespace {

std::vector<float> AddNoise(const std::vector<float>& s, double snr_db, std::uint64_t seed) {
  Gen g(seed);
  auto n = g.Noise<float>(s.size());
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ps += static_cast<double>(s[i]) * s[i];
    pn += static_cast<double>(n[i]) * n[i];
  }
  const double k = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  std::vector<float> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) y[i] = s[i] + static_cast<float>(k * n[i]);
  return y;
}

}  // namespace

TEST_CASE("compress complex: magnitude power law, phase kept, zero fixed") {
  const std::complex<double> x(3.0, 4.0);
  const auto y = dfn::CompressComplex(x, 0.3);
  CHECK(std::abs(y) == doctest::Approx(std::pow(5.0, 0.3)));
  CHECK(std::arg(y) == doctest::Approx(std::arg(x)));
  CHECK(dfn::CompressComplex(std::complex<double>(0.0), 0.3) == std::complex<double>(0.0));
  CHECK(dfn::CompressComplex(x, 1.0) == x);
}

TEST_CASE("spec loss: zero when equal, closed form against silence") {
  Gen g(71);
  const int T = 7, F = 13;
  dfn::Spectrogram<double> y(T), s(T);
  for (int t = 0; t < T; ++t) {
    y[t] = dfn::SpectralFrame<double>(F);
    s[t] = dfn::SpectralFrame<double>(F);
    for (auto& b : y[t].bins) b = std::polar(1.0, g.Uniform(-3.0, 3.0));
  }
  CHECK(dfn::SpecLoss(y, y, 0.3) == 0.0);
  // Magnitude term T * F plus phase-aware term T * F.
  CHECK(dfn::SpecLoss(y, s, 0.3) == doctest::Approx(2.0 * T * F).epsilon(1e-12));
  dfn::Spectrogram<double> shorter(y.begin(), y.end() - 1);
  CHECK_THROWS_AS(dfn::SpecLoss(shorter, s, 0.3), dfn::ShapeError);
}

TEST_CASE("losses: zero on identical signals") {
  const auto s = dfn::testing::SpeechLike(48000, 48000.0, 1);
  CHECK(dfn::MrSpecLoss(s, s) == 0.0);
  const auto r = dfn::CombinedLoss(s, s);
  CHECK(r.spec == 0.0);
  CHECK(r.mr == 0.0);
  CHECK(r.combined == 0.0);
}

TEST_CASE("losses: strictly increase as the SNR drops, 10 seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = dfn::testing::SpeechLike(24000, 48000.0, 100 + seed);
    double prev_spec = 0.0, prev_mr = 0.0;
    for (double snr : {20.0, 10.0, 0.0}) {
      const auto r = dfn::CombinedLoss(AddNoise(s, snr, seed), s);
      CHECK(r.spec > prev_spec);
      CHECK(r.mr > prev_mr);
      prev_spec = r.spec;
      prev_mr = r.mr;
    }
  }
}

TEST_CASE("mr loss: sign flip is purely a phase error") {
  const auto s = dfn::testing::SpeechLike(9600, 48000.0, 2);
  std::vector<float> neg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  dfn::LossConfig cfg;
  double expected = 0.0;
  for (double ms : cfg.mr_windows_ms) {
    const std::vector<double> sd(s.begin(), s.end());
    for (const auto& f : dfn::StftOffline<double>(sd, ms))
      for (const auto& b : f.bins) expected += 4.0 * std::pow(std::abs(b), 2.0 * cfg.c);
  }
  CHECK(dfn::MrSpecLoss(neg, s, cfg) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("mr loss: a 1 ms delay is detected at 5 ms resolution") {
  const auto s = dfn::testing::SpeechLike(9600, 48000.0, 3);
  std::vector<float> d(s.size(), 0.0f);
  std::copy(s.begin(), s.end() - 48, d.begin() + 48);
  dfn::LossConfig cfg;
  cfg.mr_windows_ms = {5.0};
  CHECK(dfn::MrSpecLoss(d, s, cfg) > 0.0);
}

TEST_CASE("mr loss: invariant to a joint time shift") {
  const auto s = dfn::testing::SpeechLike(9600, 48000.0, 4);
  const auto y = AddNoise(s, 5.0, 4);
  // A shift by a common multiple of every hop keeps framing aligned.
  const std::size_t shift = 1920;
  std::vector<float> s2(shift, 0.0f), y2(shift, 0.0f);
  s2.insert(s2.end(), s.begin(), s.end());
  y2.insert(y2.end(), y.begin(), y.end());
  CHECK(dfn::MrSpecLoss(y2, s2) == doctest::Approx(dfn::MrSpecLoss(y, s)).epsilon(1e-9));
  CHECK_THROWS_AS(dfn::MrSpecLoss(y2, s), dfn::ShapeError);
}

TEST_CASE("combined loss: weights and balance") {
  const auto s = dfn::testing::SpeechLike(48000, 48000.0, 5);
  const auto y = AddNoise(s, 5.0, 5);
  dfn::LossConfig cfg;
  const auto r = dfn::CombinedLoss(y, s, cfg);
  CHECK(r.combined == doctest::Approx(cfg.lambda_spec * r.spec + cfg.lambda_mr * r.mr));
  const double ratio = cfg.lambda_spec * r.spec / (cfg.lambda_mr * r.mr);
  CHECK((ratio >= 0.1 && ratio <= 10.0));
  cfg.lambda_mr = 0.0;
  const auto r0 = dfn::CombinedLoss(y, s, cfg);
  CHECK(r0.combined == doctest::Approx(cfg.lambda_spec * r0.spec));
  dfn::LossConfig bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
  bad = {};
  bad.lambda_spec = -1.0;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
}

TEST_CASE("schedule: endpoints, monotonicity and batch staircase") {
  dfn::ScheduleConfig cfg;
  cfg.iters_per_epoch = 50;
  CHECK(cfg.BatchStages() == std::vector<int>{8, 16, 32, 64, 96});
  const auto warm = cfg.warmup_iters();
  const auto last = cfg.total_iters() - 1;
  CHECK(dfn::ScheduleAt(0, cfg).lr == 0.0);
  CHECK(dfn::ScheduleAt(warm, cfg).lr == cfg.lr_peak);
  CHECK(dfn::ScheduleAt(last, cfg).lr == doctest::Approx(cfg.lr_final).epsilon(1e-12));
  CHECK(dfn::ScheduleAt(last, cfg).wd == doctest::Approx(cfg.wd_final).epsilon(1e-12));
  CHECK(dfn::ScheduleAt(0, cfg).wd == cfg.wd_initial);
  CHECK(dfn::ScheduleAt(0, cfg).batch_size == 8);
  CHECK(dfn::ScheduleAt(last, cfg).batch_size == 96);

  std::vector<int> seen;
  auto prev = dfn::ScheduleAt(0, cfg);
  seen.push_back(prev.batch_size);
  for (std::int64_t i = 1; i <= last; ++i) {
    const auto p = dfn::ScheduleAt(i, cfg);
    if (i < warm) REQUIRE(p.lr > prev.lr);
    if (i > warm) REQUIRE(p.lr <= prev.lr);
    REQUIRE(p.wd >= prev.wd);
    REQUIRE(p.batch_size >= prev.batch_size);
    if (p.batch_size != seen.back()) seen.push_back(p.batch_size);
    prev = p;
  }
  CHECK(seen == cfg.BatchStages());
  CHECK(dfn::ScheduleAt(last + 1000, cfg) == [&] {
    auto p = dfn::ScheduleAt(last, cfg);
    p.iter = last + 1000;
    return p;
  }());
  CHECK_THROWS_AS(dfn::ScheduleAt(-1, cfg), dfn::ConfigError);
}

TEST_CASE("schedule: csv dump and validation") {
  dfn::ScheduleConfig cfg;
  cfg.total_epochs = 10;
  cfg.iters_per_epoch = 10;
  const auto csv = dfn::ScheduleCsv(cfg, 7);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,epoch,lr,wd,batch");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 100 / 7 + 1 + 1);
  CHECK(last.rfind("99,", 0) == 0);
  dfn::ScheduleConfig bad;
  bad.warmup_epochs = 100;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
  bad = {};
  bad.batch_start = 128;
  CHECK_THROWS_AS(bad.Validate(), dfn::ConfigError);
}
