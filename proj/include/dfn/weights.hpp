// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Weight container ("DFW2", little-endian, no padding):
//
//   magic "DFW2" | version u32 | metadata length u32 + UTF-8 key=value lines
//   | tensor count u32 | per tensor: name length u16 + UTF-8 name, rank u8,
//   dims u32 x rank, float32 data row-major

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfn/key_values.hpp"
#include "dfn/model_config.hpp"
#include "dfn/tensor.hpp"

namespace dfn {

inline constexpr char kWeightsMagic[4] = {'D', 'F', 'W', '2'};
inline constexpr std::uint32_t kWeightsVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;

  bool operator==(const NamedTensor&) const = default;
};

// Immutable named-tensor container. Construction checks every tensor the
// architecture needs is present with the right shape, and nothing else is.
class ModelWeights {
 public:
  ModelWeights(const ModelConfig& cfg, std::vector<NamedTensor> tensors);
  ModelWeights(KeyValues metadata, std::vector<NamedTensor> tensors);

  const ModelConfig& config() const { return config_; }
  const KeyValues& metadata() const { return metadata_; }
  const std::vector<NamedTensor>& tensors() const { return tensors_; }

  const Tensor* Find(std::string_view name) const;
  // Throws ShapeError naming the tensor when it is missing.
  const Tensor& Get(std::string_view name) const;

 private:
  void Validate() const;

  KeyValues metadata_;
  ModelConfig config_;
  std::vector<NamedTensor> tensors_;
};

std::vector<std::uint8_t> SaveWeights(const ModelWeights& weights);
ModelWeights LoadWeights(std::span<const std::uint8_t> bytes);

void SaveWeightsFile(const ModelWeights& weights, const std::string& path);
ModelWeights LoadWeightsFile(const std::string& path);

// Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
ModelWeights RandomWeights(const ModelConfig& cfg, std::uint64_t seed);

// Weights for which the network emits unity ERB gains and the identity DF
// tap at the look-ahead, making the pipeline a pure delay.
ModelWeights IdentityWeights(const ModelConfig& cfg);

}  // namespace dfn
