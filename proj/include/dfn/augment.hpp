// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// On-the-fly mixture synthesis. Augmentations change both the noisy input
// and the clean target; distortions change only the noisy input.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dfn/key_values.hpp"

namespace dfn {

using Rng = std::mt19937_64;

// Portable draws (independent of the standard library's distributions).
double UniformDouble(Rng& rng, double lo = 0.0, double hi = 1.0);
double GaussianDouble(Rng& rng);

// Independent stream for pair `index` of a run seeded with `seed`.
Rng PairRng(std::uint64_t seed, std::uint64_t index);

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2].
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  bool IsStable() const;
  std::vector<float> Process(std::span<const float> x) const;
  // Magnitude response at a normalized frequency (cycles per sample).
  double MagnitudeAt(double freq) const;

  static Biquad Lowpass(double cutoff_hz, double q, double sample_rate);
  static Biquad Peaking(double center_hz, double q, double gain_db,
                        double sample_rate);
};

// Random second-order filter: b1, b2, a1, a2 uniform in [-3/8, 3/8].
Biquad RandomBiquad(Rng& rng);
std::vector<float> BiquadRandom(std::span<const float> x, Rng& rng,
                                Biquad* drawn = nullptr);

std::vector<float> Gain(std::span<const float> x, double db);

struct EqBand {
  double center_hz;
  double q;
  double gain_db;
};
std::vector<float> Equalize(std::span<const float> x,
                            std::span<const EqBand> bands, double sample_rate);

// Windowed-sinc (Kaiser) rate conversion that reads the input `ratio` times
// faster, so both speed and pitch scale; output length is floor(n / ratio).
std::vector<float> Resample(std::span<const float> x, double ratio);

// Noise with power spectrum proportional to f^exponent, DC removed, unit RMS.
std::vector<float> ColoredNoise(std::size_t length, double exponent, Rng& rng);

// Multiplies samples after the direct path (argmax |h|) by
// 10^(-decay_db_per_s * t / 20), t in seconds from the direct path.
std::vector<float> DecayRir(std::span<const float> h, double decay_db_per_s,
                            double sample_rate);

// Exponentially decaying Gaussian tail with a unit direct path.
std::vector<float> SyntheticRir(double rt60_s, double sample_rate,
                                std::size_t length, Rng& rng);

// RT60 from the Schroeder backward-integrated energy decay (-5 to -25 dB fit).
double EstimateRt60(std::span<const float> h, double sample_rate);

// Full linear convolution, length a + b - 1.
std::vector<float> FftConvolve(std::span<const float> a, std::span<const float> b);

std::vector<float> HardClip(std::span<const float> x, float threshold);

double SignalPower(std::span<const float> x);
// 10 log10(|s|^2 / |s - d|^2); +inf when d == s.
double SnrDb(std::span<const float> s, std::span<const float> d);

struct ClipResult {
  std::vector<float> signal;
  float threshold = 0.0f;
  double snr_db = 0.0;
  bool reached = false;   // |snr_db - target| <= 0.5 dB
  bool identity = false;  // threshold >= peak, nothing clipped
};

// Bisection on the hard-clip threshold for a target SNR in [0, 20] dB.
ClipResult ClipToSnr(std::span<const float> x, double target_snr_db);

struct AugmentSpec {
  std::uint64_t seed = 0;

  // Augmentations (speech and noise).
  double p_biquad = 0.5;
  double p_gain = 0.5;
  double gain_db_min = -6.0, gain_db_max = 6.0;
  double p_eq = 0.3;
  int eq_bands = 3;
  double eq_gain_db_min = -6.0, eq_gain_db_max = 6.0;
  double p_resample = 0.0;
  double resample_min = 0.9, resample_max = 1.1;
  // Colored noise, added to the noise signal only.
  double p_colored_noise = 0.3;
  double colored_exp_min = -2.0, colored_exp_max = 2.0;
  double colored_level_db = -10.0;  // relative to the noise RMS

  // Distortions (noisy only).
  double p_reverb_decay = 1.0;  // target uses a decayed RIR when h is given
  double decay_db_per_s_min = 60.0, decay_db_per_s_max = 200.0;
  double p_clipping = 0.0;
  double clip_snr_min = 0.0, clip_snr_max = 20.0;

  double sample_rate = 48000.0;
  double headroom = 4.0;

  void Validate() const;
  void Apply(const KeyValues& kv);
  // Every transform disabled.
  static AugmentSpec None();
};

struct TransformRecord {
  std::string name;
  KeyValues params;
};

struct MixturePair {
  std::vector<float> noisy;
  std::vector<float> target;
  // Reverberant speech and scaled noise before distortion and summation.
  std::vector<float> speech_component;
  std::vector<float> noise_component;
  std::vector<float> distorted_speech;
  double snr_db = 0.0;
  std::vector<TransformRecord> log;

  // One "name key=value ..." line per transform.
  std::string LogText() const;
};

// noisy = distort(aug(s) * h) + k aug(n) at snr_db (infinite: no noise);
// target = aug(s) * decay(h). Noise is tiled or trimmed to the speech length.
MixturePair Mix(std::span<const float> speech, std::span<const float> noise,
                const std::vector<float>* rir, double snr_db,
                const AugmentSpec& spec, Rng& rng);

}  // namespace dfn
