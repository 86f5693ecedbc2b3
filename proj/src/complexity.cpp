// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/complexity.hpp"

#include <cstdio>

namespace dfn {

ComplexityReport CountParamsMacs(std::span<const LayerSpec> layers,
                                 double frames_per_second) {
  ComplexityReport r;
  r.frames_per_second = frames_per_second;
  for (const auto& spec : layers) {
    if (spec.kind == LayerKind::kActivation) continue;
    LayerComplexity l{spec.name, spec.kind, LayerParams(spec),
                      LayerMacsPerFrame(spec)};
    r.params += l.params;
    r.macs_per_frame += l.macs_per_frame;
    r.layers.push_back(std::move(l));
  }
  r.macs_per_second = static_cast<double>(r.macs_per_frame) * frames_per_second;
  return r;
}

ComplexityReport CountParamsMacs(const ModelConfig& cfg) {
  const auto layers = ModelLayers(cfg);
  return CountParamsMacs(layers, cfg.stft.frames_per_second());
}

ComplexityReport CountParamsMacs(const ModelWeights& weights) {
  return CountParamsMacs(weights.config());
}

std::int64_t TensorElementSum(const ModelWeights& weights) {
  std::int64_t n = 0;
  for (const auto& t : weights.tensors())
    n += static_cast<std::int64_t>(t.tensor.size());
  return n;
}

std::string ComplexityReport::Format(bool per_layer) const {
  std::string out;
  char line[160];
  if (per_layer) {
    std::snprintf(line, sizeof(line), "%-28s %-15s %12s %14s\n", "layer",
                  "kind", "params", "MACs/frame");
    out += line;
    for (const auto& l : layers) {
      std::snprintf(line, sizeof(line), "%-28s %-15s %12lld %14lld\n",
                    l.name.c_str(), ToString(l.kind).c_str(),
                    static_cast<long long>(l.params),
                    static_cast<long long>(l.macs_per_frame));
      out += line;
    }
  }
  std::snprintf(line, sizeof(line),
                "params: %lld (%.3f M)\nMACs/frame: %lld\n"
                "frames/s: %g\nMACs/s: %.0f (%.4f G)\n",
                static_cast<long long>(params), params * 1e-6,
                static_cast<long long>(macs_per_frame), frames_per_second,
                macs_per_second, macs_per_second * 1e-9);
  out += line;
  return out;
}

}  // namespace dfn
