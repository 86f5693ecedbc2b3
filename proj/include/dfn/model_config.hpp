// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "dfn/deep_filter.hpp"
#include "dfn/erb.hpp"
#include "dfn/key_values.hpp"
#include "dfn/layers.hpp"
#include "dfn/stft.hpp"

namespace dfn {

// Everything needed to rebuild the network and its feature pipeline. Stored
// as the metadata block of the weight container.
struct ModelConfig {
  StftConfig stft;
  DfConfig df;
  int n_bands = 32;
  ErbWeighting erb_weighting = ErbWeighting::kTriangular;
  std::vector<int> erb_edges;  // empty: derived from the ERB-rate scale
  int conv_channels = 64;
  int gru_hidden = 256;
  int n_groups = 8;
  int df_hidden = 256;
  int df_out_groups = 4;
  // Feature normalization: exponential moving statistics with time constant
  // norm_tau seconds; ERB features are mean-subtracted then scaled.
  double norm_tau = 1.0;
  double erb_norm_scale = 1.0 / 40.0;

  void Validate() const;
  ErbFilterbank Filterbank() const;

  int erb_emb_freq() const { return n_bands / 4; }
  int df_emb_freq() const { return df.n_df_bins / 2; }

  KeyValues ToMetadata() const;
  static ModelConfig FromMetadata(const KeyValues& kv);
  // Overrides fields present in `kv`; other keys are left alone.
  void Apply(const KeyValues& kv);
  static const std::vector<std::string>& Keys();

  bool operator==(const ModelConfig&) const = default;
};

// Ordered layer list of the two-stage network: unified encoder (ERB and DF
// convolution paths, grouped linear embedding, GRU), ERB gain decoder and DF
// coefficient decoder.
std::vector<LayerSpec> ModelLayers(const ModelConfig& cfg);

}  // namespace dfn
