// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "dfn/deep_filter.hpp"

namespace dfn {

float PostFilterGain(float gain, float beta) {
  const double g = gain;
  const double shaped = g * std::sin(std::numbers::pi / 2.0 * g);
  return static_cast<float>((1.0 + beta) * g / (1.0 + beta + shaped));
}

void PostFilterInPlace(std::span<float> gains, float beta) {
  if (beta < 0.0f) throw ConfigError("post_filter: beta must be >= 0");
  for (float& g : gains) g = PostFilterGain(g, beta);
}

std::vector<float> PostFilter(std::span<const float> gains, float beta) {
  std::vector<float> out(gains.begin(), gains.end());
  PostFilterInPlace(out, beta);
  return out;
}

}  // namespace dfn
