// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/augment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "dfn/error.hpp"
#include "dfn/fft.hpp"

namespace dfn {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 2;
  while (p < n) p <<= 1;
  return p;
}

void CheckRange(const char* what, double lo, double hi, double min, double max) {
  if (!(lo <= hi) || lo < min || hi > max)
    throw ConfigError(std::string("augment: ") + what + " range [" + FormatNumber(lo) +
                      ", " + FormatNumber(hi) + "] must lie within [" +
                      FormatNumber(min) + ", " + FormatNumber(max) + "]");
}

void CheckProb(const char* what, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(std::string("augment: probability ") + what + " must be in [0, 1]");
}

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

KeyValues Params(std::initializer_list<std::pair<const char*, double>> items) {
  KeyValues kv;
  for (const auto& [k, v] : items) kv.Set(k, v);
  return kv;
}

// Tiles or trims x to n samples.
std::vector<float> FitLength(std::span<const float> x, std::size_t n) {
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i % x.size()];
  return out;
}

}  // namespace

double UniformDouble(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double GaussianDouble(Rng& rng) {
  // Box-Muller; u1 in (0, 1].
  const double u1 = 1.0 - UniformDouble(rng);
  const double u2 = UniformDouble(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Rng PairRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

bool Biquad::IsStable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

std::vector<float> Biquad::Process(std::span<const float> x) const {
  std::vector<float> y(x.size());
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double xn = x[n];
    const double yn = b0 * xn + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = xn;
    y2 = y1;
    y1 = yn;
    y[n] = static_cast<float>(yn);
  }
  return y;
}

double Biquad::MagnitudeAt(double freq) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * freq);
  const std::complex<double> z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

Biquad Biquad::Lowpass(double cutoff_hz, double q, double sample_rate) {
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0,
          -2.0 * cw / a0, (1.0 - alpha) / a0};
}

Biquad Biquad::Peaking(double center_hz, double q, double gain_db,
                       double sample_rate) {
  const double a = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * kPi * center_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha / a;
  return {(1.0 + alpha * a) / a0, -2.0 * cw / a0, (1.0 - alpha * a) / a0,
          -2.0 * cw / a0, (1.0 - alpha / a) / a0};
}

Biquad RandomBiquad(Rng& rng) {
  for (;;) {
    Biquad f;
    f.b1 = UniformDouble(rng, -0.375, 0.375);
    f.b2 = UniformDouble(rng, -0.375, 0.375);
    f.a1 = UniformDouble(rng, -0.375, 0.375);
    f.a2 = UniformDouble(rng, -0.375, 0.375);
    if (f.IsStable()) return f;
  }
}

std::vector<float> BiquadRandom(std::span<const float> x, Rng& rng, Biquad* drawn) {
  const Biquad f = RandomBiquad(rng);
  if (drawn) *drawn = f;
  return f.Process(x);
}

std::vector<float> Gain(std::span<const float> x, double db) {
  const double g = std::pow(10.0, db / 20.0);
  std::vector<float> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<float>(x[i] * g);
  return y;
}

std::vector<float> Equalize(std::span<const float> x, std::span<const EqBand> bands,
                            double sample_rate) {
  std::vector<float> y(x.begin(), x.end());
  for (const auto& b : bands) {
    if (b.center_hz <= 0.0 || b.center_hz >= sample_rate / 2 || b.q <= 0.0)
      throw ConfigError("eq: band center must be in (0, fs/2) with q > 0");
    y = Biquad::Peaking(b.center_hz, b.q, b.gain_db, sample_rate).Process(y);
  }
  return y;
}

std::vector<float> Resample(std::span<const float> x, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw ConfigError("resample: ratio must be > 0");
  constexpr double kZeroCrossings = 32.0;
  constexpr double kBeta = 8.6;
  const double cutoff = std::min(1.0, 1.0 / ratio);
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);
  // Kernel tabulated at kOversample points per input sample and linearly
  // interpolated; Bessel evaluation per tap is far too slow.
  constexpr int kOversample = 512;
  const auto table_len = static_cast<std::size_t>(std::ceil(half_width * kOversample)) + 2;
  std::vector<double> kernel(table_len);
  for (std::size_t i = 0; i < table_len; ++i) {
    const double d = static_cast<double>(i) / kOversample;
    const double r = d / half_width;
    const double win = r >= 1.0 ? 0.0
                                : std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
    kernel[i] = cutoff * Sinc(cutoff * d) * win;
  }
  const auto out_len = static_cast<std::size_t>(std::floor(static_cast<double>(x.size()) / ratio));
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<float> y(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const double t = static_cast<double>(m) * ratio;
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
      const double pos = std::abs(t - static_cast<double>(k)) * kOversample;
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      acc += x[static_cast<std::size_t>(k)] * (kernel[i] + frac * (kernel[i + 1] - kernel[i]));
    }
    y[m] = static_cast<float>(acc);
  }
  return y;
}

std::vector<float> ColoredNoise(std::size_t length, double exponent, Rng& rng) {
  if (length == 0) return {};
  const std::size_t n = NextPow2(length);
  std::vector<double> white(n);
  for (double& v : white) v = GaussianDouble(rng);
  RealFft<double> fft(n);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.Forward(white, spec);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    spec[k] *= std::pow(static_cast<double>(k) / static_cast<double>(n), exponent / 2.0);
  fft.Inverse(spec, white);
  double power = 0.0;
  for (std::size_t i = 0; i < length; ++i) power += white[i] * white[i];
  const double scale = power > 0.0 ? 1.0 / std::sqrt(power / static_cast<double>(length)) : 0.0;
  std::vector<float> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = static_cast<float>(white[i] * scale);
  return out;
}

std::vector<float> DecayRir(std::span<const float> h, double decay_db_per_s,
                            double sample_rate) {
  if (h.empty()) throw ConfigError("decay_rir: empty impulse response");
  if (decay_db_per_s < 0.0) throw ConfigError("decay_rir: decay must be >= 0");
  std::size_t direct = 0;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (std::abs(h[i]) > std::abs(h[direct])) direct = i;
  const double kappa = decay_db_per_s * std::log(10.0) / 20.0;
  std::vector<float> out(h.begin(), h.end());
  for (std::size_t i = direct + 1; i < h.size(); ++i)
    out[i] = static_cast<float>(
        h[i] * std::exp(-kappa * static_cast<double>(i - direct) / sample_rate));
  return out;
}

std::vector<float> SyntheticRir(double rt60_s, double sample_rate, std::size_t length,
                                Rng& rng) {
  if (rt60_s <= 0.0 || length == 0) throw ConfigError("rir: need rt60 > 0 and length > 0");
  std::vector<float> h(length);
  h[0] = 1.0f;
  for (std::size_t i = 1; i < length; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double v = 0.3 * GaussianDouble(rng) * std::pow(10.0, -3.0 * t / rt60_s);
    h[i] = static_cast<float>(std::clamp(v, -0.9, 0.9));
  }
  return h;
}

double EstimateRt60(std::span<const float> h, double sample_rate) {
  std::vector<double> edc(h.size() + 1, 0.0);
  for (std::size_t i = h.size(); i-- > 0;)
    edc[i] = edc[i + 1] + static_cast<double>(h[i]) * h[i];
  if (edc[0] <= 0.0) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i] / edc[0]);
    if (db > -5.0) continue;
    if (db < -25.0) break;
    const double x = static_cast<double>(i);
    sx += x;
    sy += db;
    sxx += x * x;
    sxy += x * db;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::infinity();
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (slope >= 0.0) return std::numeric_limits<double>::infinity();
  return -60.0 / slope / sample_rate;
}

std::vector<float> FftConvolve(std::span<const float> a, std::span<const float> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = NextPow2(len);
  RealFft<double> fft(n);
  std::vector<double> ta(n, 0.0), tb(n, 0.0);
  std::copy(a.begin(), a.end(), ta.begin());
  std::copy(b.begin(), b.end(), tb.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.Forward(ta, fa);
  fft.Forward(tb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.Inverse(fa, ta);
  std::vector<float> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<float>(ta[i] / static_cast<double>(n));
  return out;
}

std::vector<float> HardClip(std::span<const float> x, float threshold) {
  std::vector<float> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], -threshold, threshold);
  return y;
}

double SignalPower(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double p = 0.0;
  for (float v : x) p += static_cast<double>(v) * v;
  return p / static_cast<double>(x.size());
}

double SnrDb(std::span<const float> s, std::span<const float> d) {
  if (s.size() != d.size()) throw ShapeError("snr: length mismatch");
  double ps = 0.0, pe = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = static_cast<double>(s[i]) - d[i];
    ps += static_cast<double>(s[i]) * s[i];
    pe += e * e;
  }
  if (pe == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ps / pe);
}

ClipResult ClipToSnr(std::span<const float> x, double target_snr_db) {
  const bool infinite = std::isinf(target_snr_db) && target_snr_db > 0;
  if (!infinite && !(target_snr_db >= 0.0 && target_snr_db <= 20.0))
    throw ConfigError("clip: target SNR must be in [0, 20] dB");
  float peak = 0.0f;
  for (float v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0f) throw ConfigError("clip: signal is silent");
  ClipResult r;
  if (infinite) {
    r.signal.assign(x.begin(), x.end());
    r.threshold = peak;
    r.snr_db = std::numeric_limits<double>::infinity();
    r.reached = true;
    r.identity = true;
    return r;
  }
  // SNR grows monotonically with the threshold: 0 dB at 0, +inf at the peak.
  double lo = 0.0, hi = peak;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double snr = SnrDb(x, HardClip(x, static_cast<float>(mid)));
    if (snr < target_snr_db) lo = mid; else hi = mid;
    if (hi - lo <= 1e-7 * peak) break;
  }
  r.threshold = static_cast<float>(0.5 * (lo + hi));
  r.signal = HardClip(x, r.threshold);
  r.snr_db = SnrDb(x, r.signal);
  r.reached = std::abs(r.snr_db - target_snr_db) <= 0.5;
  r.identity = r.threshold >= peak;
  return r;
}

void AugmentSpec::Validate() const {
  for (auto [name, p] : {std::pair{"p_biquad", p_biquad}, {"p_gain", p_gain},
                         {"p_eq", p_eq}, {"p_resample", p_resample},
                         {"p_colored_noise", p_colored_noise},
                         {"p_reverb_decay", p_reverb_decay}, {"p_clipping", p_clipping}})
    CheckProb(name, p);
  CheckRange("gain_db", gain_db_min, gain_db_max, -12.0, 12.0);
  CheckRange("eq_gain_db", eq_gain_db_min, eq_gain_db_max, -12.0, 12.0);
  CheckRange("resample", resample_min, resample_max, 0.9, 1.1);
  CheckRange("colored_exp", colored_exp_min, colored_exp_max, -2.0, 2.0);
  CheckRange("decay_db_per_s", decay_db_per_s_min, decay_db_per_s_max, 0.0, 1e6);
  CheckRange("clip_snr", clip_snr_min, clip_snr_max, 0.0, 20.0);
  if (eq_bands < 0) throw ConfigError("augment: eq_bands must be >= 0");
  if (sample_rate <= 0.0) throw ConfigError("augment: sample_rate must be > 0");
  if (headroom <= 0.0) throw ConfigError("augment: headroom must be > 0");
}

void AugmentSpec::Apply(const KeyValues& kv) {
  seed = static_cast<std::uint64_t>(kv.GetInt("seed", static_cast<long long>(seed)));
  auto d = [&](const char* key, double& field) { field = kv.GetDouble(key, field); };
  d("p_biquad", p_biquad);
  d("p_gain", p_gain);
  d("gain_db_min", gain_db_min);
  d("gain_db_max", gain_db_max);
  d("p_eq", p_eq);
  eq_bands = static_cast<int>(kv.GetInt("eq_bands", eq_bands));
  d("eq_gain_db_min", eq_gain_db_min);
  d("eq_gain_db_max", eq_gain_db_max);
  d("p_resample", p_resample);
  d("resample_min", resample_min);
  d("resample_max", resample_max);
  d("p_colored_noise", p_colored_noise);
  d("colored_exp_min", colored_exp_min);
  d("colored_exp_max", colored_exp_max);
  d("colored_level_db", colored_level_db);
  d("p_reverb_decay", p_reverb_decay);
  d("decay_db_per_s_min", decay_db_per_s_min);
  d("decay_db_per_s_max", decay_db_per_s_max);
  d("p_clipping", p_clipping);
  d("clip_snr_min", clip_snr_min);
  d("clip_snr_max", clip_snr_max);
  d("sample_rate", sample_rate);
  d("headroom", headroom);
}

AugmentSpec AugmentSpec::None() {
  AugmentSpec s;
  s.p_biquad = s.p_gain = s.p_eq = s.p_resample = 0.0;
  s.p_colored_noise = s.p_reverb_decay = s.p_clipping = 0.0;
  return s;
}

std::string MixturePair::LogText() const {
  std::string out;
  for (const auto& rec : log) {
    out += rec.name;
    for (const auto& [k, v] : rec.params.entries()) out += ' ' + k + '=' + v;
    out += '\n';
  }
  return out;
}

MixturePair Mix(std::span<const float> speech, std::span<const float> noise,
                const std::vector<float>* rir, double snr_db, const AugmentSpec& spec,
                Rng& rng) {
  spec.Validate();
  if (SignalPower(speech) == 0.0) throw ConfigError("mix: speech is silent");
  const bool no_noise = std::isinf(snr_db) && snr_db > 0;
  if (std::isnan(snr_db) || (std::isinf(snr_db) && !no_noise))
    throw ConfigError("mix: snr must be finite or +inf");
  if (!no_noise && SignalPower(noise) == 0.0) throw ConfigError("mix: noise is silent");

  MixturePair pair;
  pair.snr_db = snr_db;
  auto log = [&](std::string name, KeyValues params) {
    pair.log.push_back({std::move(name), std::move(params)});
  };
  auto draw = [&](double p) { return p > 0.0 && UniformDouble(rng) < p; };

  // Speech augmentations.
  std::vector<float> s(speech.begin(), speech.end());
  if (draw(spec.p_resample)) {
    const double ratio = UniformDouble(rng, spec.resample_min, spec.resample_max);
    s = Resample(s, ratio);
    log("speech.resample", Params({{"ratio", ratio}}));
  }
  if (draw(spec.p_biquad)) {
    Biquad f;
    s = BiquadRandom(s, rng, &f);
    log("speech.biquad", Params({{"b1", f.b1}, {"b2", f.b2}, {"a1", f.a1}, {"a2", f.a2}}));
  }
  if (draw(spec.p_eq) && spec.eq_bands > 0) {
    std::vector<EqBand> bands;
    KeyValues kv;
    for (int i = 0; i < spec.eq_bands; ++i) {
      const double fc = 40.0 * std::pow(2.0, UniformDouble(rng, 0.0, std::log2(8000.0 / 40.0)));
      const double q = UniformDouble(rng, 0.5, 1.5);
      const double g = UniformDouble(rng, spec.eq_gain_db_min, spec.eq_gain_db_max);
      bands.push_back({fc, q, g});
      const std::string p = "band" + std::to_string(i) + ".";
      kv.Set(p + "hz", fc);
      kv.Set(p + "q", q);
      kv.Set(p + "db", g);
    }
    s = Equalize(s, bands, spec.sample_rate);
    log("speech.eq", kv);
  }
  if (draw(spec.p_gain)) {
    const double db = UniformDouble(rng, spec.gain_db_min, spec.gain_db_max);
    s = Gain(s, db);
    log("speech.gain", Params({{"db", db}}));
  }
  if (SignalPower(s) == 0.0) throw ConfigError("mix: augmented speech is silent");
  const std::size_t n = s.size();

  // Noise augmentations.
  std::vector<float> nz = no_noise ? std::vector<float>(n, 0.0f) : FitLength(noise, n);
  if (!no_noise) {
    if (draw(spec.p_biquad)) {
      Biquad f;
      nz = BiquadRandom(nz, rng, &f);
      log("noise.biquad", Params({{"b1", f.b1}, {"b2", f.b2}, {"a1", f.a1}, {"a2", f.a2}}));
    }
    if (draw(spec.p_colored_noise)) {
      const double e = UniformDouble(rng, spec.colored_exp_min, spec.colored_exp_max);
      const auto c = ColoredNoise(n, e, rng);
      const double level = std::sqrt(SignalPower(nz)) * std::pow(10.0, spec.colored_level_db / 20.0);
      for (std::size_t i = 0; i < n; ++i) nz[i] += static_cast<float>(level * c[i]);
      log("noise.colored", Params({{"exponent", e}, {"level_db", spec.colored_level_db}}));
    }
    if (SignalPower(nz) == 0.0) throw ConfigError("mix: augmented noise is silent");
  }

  // Reverberation: the target keeps a faster-decaying version of the RIR.
  std::vector<float> s_rev = s;
  pair.target = s;
  if (rir && !rir->empty()) {
    s_rev = FftConvolve(s, *rir);
    s_rev.resize(n);
    if (draw(spec.p_reverb_decay)) {
      const double d = UniformDouble(rng, spec.decay_db_per_s_min, spec.decay_db_per_s_max);
      pair.target = FftConvolve(s, DecayRir(*rir, d, spec.sample_rate));
      pair.target.resize(n);
      log("target.rir_decay", Params({{"db_per_s", d}}));
    } else {
      pair.target = s_rev;
    }
    log("speech.rir", Params({{"length", static_cast<double>(rir->size())}}));
  }

  // Noise level from pre-distortion powers.
  double k = 0.0;
  if (!no_noise)
    k = std::sqrt(SignalPower(s_rev) / (SignalPower(nz) * std::pow(10.0, snr_db / 10.0)));
  for (float& v : nz) v = static_cast<float>(v * k);
  log("mix", Params({{"snr_db", snr_db}, {"noise_scale", k}}));

  // Distortions.
  std::vector<float> distorted = s_rev;
  if (draw(spec.p_clipping)) {
    const double target = UniformDouble(rng, spec.clip_snr_min, spec.clip_snr_max);
    const ClipResult c = ClipToSnr(s_rev, target);
    distorted = c.signal;
    log("noisy.clip", Params({{"target_snr_db", target},
                              {"snr_db", c.snr_db},
                              {"threshold", c.threshold},
                              {"reached", c.reached ? 1.0 : 0.0}}));
  }

  pair.noisy.resize(n);
  for (std::size_t i = 0; i < n; ++i) pair.noisy[i] = distorted[i] + nz[i];
  pair.speech_component = std::move(s_rev);
  pair.noise_component = std::move(nz);
  pair.distorted_speech = std::move(distorted);

  // Joint headroom guard keeps every ratio intact.
  float peak = 0.0f;
  for (const auto* v : {&pair.noisy, &pair.target, &pair.speech_component, &pair.noise_component})
    for (float x : *v) peak = std::max(peak, std::abs(x));
  if (!std::isfinite(peak)) throw ConfigError("mix: non-finite samples");
  if (peak > spec.headroom) {
    const float g = static_cast<float>(spec.headroom / peak);
    for (auto* v : {&pair.noisy, &pair.target, &pair.speech_component,
                    &pair.noise_component, &pair.distorted_speech})
      for (float& x : *v) x *= g;
    log("headroom", Params({{"scale", g}}));
  }
  return pair;
}

}  // namespace dfn
