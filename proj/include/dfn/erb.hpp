// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "dfn/stft.hpp"

namespace dfn {

enum class ErbWeighting { kTriangular, kRectangular };

std::string ToString(ErbWeighting w);
ErbWeighting ParseErbWeighting(const std::string& s);

// ERB-rate scale (Glasberg and Moore): 9.265 * ln(1 + f / 226.25).
double FreqToErb(double hz);
double ErbToFreq(double erb);

// Disjoint bands aggregating F linear-frequency bins into B ERB bands.
// Row b of the B x F weight matrix is supported on [edges[b], edges[b+1]) and
// sums to one.
class ErbFilterbank {
 public:
  ErbFilterbank() = default;
  // Rebuilds the filterbank from explicit band edges (edges[0] = 0,
  // edges[B] = F, strictly increasing).
  ErbFilterbank(std::vector<int> band_edges, ErbWeighting weighting);

  int n_bands() const { return static_cast<int>(edges_.size()) - 1; }
  int n_bins() const { return edges_.empty() ? 0 : edges_.back(); }
  const std::vector<int>& band_edges() const { return edges_; }
  ErbWeighting weighting() const { return weighting_; }
  float weight(int band, int bin) const {
    return weights_[static_cast<std::size_t>(band) * n_bins() + bin];
  }
  std::span<const float> weights() const { return weights_; }

 private:
  std::vector<int> edges_;
  ErbWeighting weighting_ = ErbWeighting::kTriangular;
  std::vector<float> weights_;  // row-major B x F
};

// Band edges spaced uniformly on the ERB-rate scale over [0, sample_rate / 2],
// each band at least one bin wide.
std::vector<int> ErbBandEdges(const StftConfig& cfg, int n_bands);

ErbFilterbank BuildFilterbank(
    const StftConfig& cfg, int n_bands,
    ErbWeighting weighting = ErbWeighting::kTriangular);

inline constexpr float kErbPowerFloor = 1e-10f;

// Weighted band power in dB: 10 log10(sum_f w(b,f) |X(f)|^2 + 1e-10).
std::vector<float> Compress(const SpectralFrame<float>& frame,
                            const ErbFilterbank& fb);
void Compress(std::span<const std::complex<float>> bins,
              const ErbFilterbank& fb, std::span<float> out);

// Per-bin gains g(f) = sum_b w(b,f) G(b) / sum_b w(b,f).
std::vector<float> InterpolateGains(std::span<const float> band_gains,
                                    const ErbFilterbank& fb);
void InterpolateGains(std::span<const float> band_gains,
                      const ErbFilterbank& fb, std::span<float> out);

SpectralFrame<float> ApplyGains(const SpectralFrame<float>& frame,
                                std::span<const float> bin_gains);
void ApplyGainsInPlace(std::span<std::complex<float>> bins,
                       std::span<const float> bin_gains);

}  // namespace dfn
