// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/erb.hpp"

#include <algorithm>
#include <cmath>

namespace dfn {

namespace {
constexpr double kErbScale = 9.265;
constexpr double kErbCorner = 24.7 * 9.16;  // 226.25 Hz
}  // namespace

std::string ToString(ErbWeighting w) {
  return w == ErbWeighting::kTriangular ? "triangular" : "rectangular";
}

ErbWeighting ParseErbWeighting(const std::string& s) {
  if (s == "triangular") return ErbWeighting::kTriangular;
  if (s == "rectangular") return ErbWeighting::kRectangular;
  throw ConfigError("erb: unknown weighting '" + s + "'");
}

double FreqToErb(double hz) { return kErbScale * std::log1p(hz / kErbCorner); }

double ErbToFreq(double erb) {
  return kErbCorner * std::expm1(erb / kErbScale);
}

ErbFilterbank::ErbFilterbank(std::vector<int> band_edges,
                             ErbWeighting weighting)
    : edges_(std::move(band_edges)), weighting_(weighting) {
  if (edges_.size() < 3)
    throw ConfigError("erb: need at least two bands");
  if (edges_.front() != 0) throw ConfigError("erb: band_edges[0] must be 0");
  for (std::size_t b = 1; b < edges_.size(); ++b)
    if (edges_[b] <= edges_[b - 1])
      throw ConfigError("erb: band edges must be strictly increasing");
  const int bands = n_bands();
  const int bins = n_bins();
  weights_.assign(static_cast<std::size_t>(bands) * bins, 0.0f);
  for (int b = 0; b < bands; ++b) {
    const int lo = edges_[b];
    const int width = edges_[b + 1] - lo;
    std::vector<double> shape(static_cast<std::size_t>(width), 1.0);
    if (weighting_ == ErbWeighting::kTriangular)
      for (int j = 0; j < width; ++j)
        shape[j] = static_cast<double>(std::min(j + 1, width - j));
    double total = 0.0;
    for (double v : shape) total += v;
    for (int j = 0; j < width; ++j)
      weights_[static_cast<std::size_t>(b) * bins + lo + j] =
          static_cast<float>(shape[j] / total);
  }
}

std::vector<int> ErbBandEdges(const StftConfig& cfg, int n_bands) {
  cfg.Validate();
  const int bins = cfg.n_bins();
  if (n_bands < 2 || n_bands > bins)
    throw ConfigError("erb: n_bands must be in [2, " + std::to_string(bins) +
                      "], got " + std::to_string(n_bands));
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_len;
  const double erb_max = FreqToErb(cfg.sample_rate / 2.0);
  std::vector<int> edges(static_cast<std::size_t>(n_bands) + 1);
  edges[0] = 0;
  edges[n_bands] = bins;
  for (int b = 1; b < n_bands; ++b) {
    const double hz = ErbToFreq(erb_max * b / n_bands);
    int edge = static_cast<int>(std::lround(hz / bin_hz));
    edge = std::max(edge, edges[b - 1] + 1);
    edge = std::min(edge, bins - (n_bands - b));
    edges[b] = edge;
  }
  return edges;
}

ErbFilterbank BuildFilterbank(const StftConfig& cfg, int n_bands,
                              ErbWeighting weighting) {
  return ErbFilterbank(ErbBandEdges(cfg, n_bands), weighting);
}

void Compress(std::span<const std::complex<float>> bins,
              const ErbFilterbank& fb, std::span<float> out) {
  if (bins.size() != static_cast<std::size_t>(fb.n_bins()))
    throw ShapeError("erb compress: frame has " + std::to_string(bins.size()) +
                     " bins, filterbank expects " +
                     std::to_string(fb.n_bins()));
  if (out.size() != static_cast<std::size_t>(fb.n_bands()))
    throw ShapeError("erb compress: output must hold n_bands values");
  const auto& edges = fb.band_edges();
  for (int b = 0; b < fb.n_bands(); ++b) {
    double power = 0.0;
    for (int f = edges[b]; f < edges[b + 1]; ++f)
      power += static_cast<double>(fb.weight(b, f)) * std::norm(bins[f]);
    out[b] = static_cast<float>(10.0 * std::log10(power + kErbPowerFloor));
  }
}

std::vector<float> Compress(const SpectralFrame<float>& frame,
                            const ErbFilterbank& fb) {
  std::vector<float> out(static_cast<std::size_t>(fb.n_bands()));
  Compress(frame.bins, fb, out);
  return out;
}

void InterpolateGains(std::span<const float> band_gains,
                      const ErbFilterbank& fb, std::span<float> out) {
  if (band_gains.size() != static_cast<std::size_t>(fb.n_bands()))
    throw ShapeError("erb interpolate: expected " +
                     std::to_string(fb.n_bands()) + " band gains, got " +
                     std::to_string(band_gains.size()));
  if (out.size() != static_cast<std::size_t>(fb.n_bins()))
    throw ShapeError("erb interpolate: output must hold n_bins values");
  // Bands are disjoint, so each column has a single nonzero weight w and the
  // normalized transpose reduces to w * G / w.
  const auto& edges = fb.band_edges();
  for (int b = 0; b < fb.n_bands(); ++b)
    for (int f = edges[b]; f < edges[b + 1]; ++f) {
      const float w = fb.weight(b, f);
      out[f] = (w * band_gains[b]) / w;
    }
}

std::vector<float> InterpolateGains(std::span<const float> band_gains,
                                    const ErbFilterbank& fb) {
  std::vector<float> out(static_cast<std::size_t>(fb.n_bins()));
  InterpolateGains(band_gains, fb, out);
  return out;
}

void ApplyGainsInPlace(std::span<std::complex<float>> bins,
                       std::span<const float> bin_gains) {
  if (bins.size() != bin_gains.size())
    throw ShapeError("apply_gains: " + std::to_string(bin_gains.size()) +
                     " gains for " + std::to_string(bins.size()) + " bins");
  for (float g : bin_gains)
    if (!std::isfinite(g) || g < 0.0f)
      throw ConfigError("apply_gains: gains must be finite and >= 0");
  for (std::size_t f = 0; f < bins.size(); ++f) bins[f] *= bin_gains[f];
}

SpectralFrame<float> ApplyGains(const SpectralFrame<float>& frame,
                                std::span<const float> bin_gains) {
  SpectralFrame<float> out = frame;
  ApplyGainsInPlace(out.bins, bin_gains);
  return out;
}

}  // namespace dfn
