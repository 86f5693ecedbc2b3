// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Analytic parameter and multiply-accumulate accounting.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfn/layers.hpp"
#include "dfn/model_config.hpp"
#include "dfn/weights.hpp"

namespace dfn {

struct LayerComplexity {
  std::string name;
  LayerKind kind;
  std::int64_t params = 0;
  std::int64_t macs_per_frame = 0;
};

struct ComplexityReport {
  std::int64_t params = 0;
  std::int64_t macs_per_frame = 0;
  double frames_per_second = 0.0;
  double macs_per_second = 0.0;
  std::vector<LayerComplexity> layers;

  // Human-readable table with a per-layer breakdown.
  std::string Format(bool per_layer = true) const;
};

ComplexityReport CountParamsMacs(std::span<const LayerSpec> layers,
                                 double frames_per_second);
ComplexityReport CountParamsMacs(const ModelConfig& cfg);
ComplexityReport CountParamsMacs(const ModelWeights& weights);

// Exhaustive element count over every stored tensor.
std::int64_t TensorElementSum(const ModelWeights& weights);

}  // namespace dfn
