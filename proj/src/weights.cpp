// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

namespace dfn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "weight serialization assumes a little-endian host");

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void Pod(T v) {
    Bytes(&v, sizeof(T));
  }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void Bytes(void* p, std::size_t n, const char* what) {
    if (n > in_.size() - pos_)
      throw TruncatedError(std::string("weights: truncated while reading ") +
                           what + " at byte " + std::to_string(pos_));
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T Pod(const char* what) {
    T v;
    Bytes(&v, sizeof(T), what);
    return v;
  }
  std::string String(std::size_t n, const char* what) {
    std::string s(n, '\0');
    Bytes(s.data(), n, what);
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Portable uniform draw in [-1, 1).
double UniformSigned(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

std::size_t FanIn(const LayerSpec& s) {
  switch (s.kind) {
    case LayerKind::kConv:
    case LayerKind::kPathwayConv:
    case LayerKind::kTConv:
      return static_cast<std::size_t>(s.in_channels / s.groups) * s.kernel_t *
             s.kernel_f;
    case LayerKind::kGroupedLinear:
      return static_cast<std::size_t>(s.in_channels / s.groups);
    case LayerKind::kGru:
      return static_cast<std::size_t>(s.out_channels);
    case LayerKind::kActivation:
      return 1;
  }
  return 1;
}

}  // namespace

ModelWeights::ModelWeights(const ModelConfig& cfg,
                           std::vector<NamedTensor> tensors)
    : metadata_((cfg.Validate(), cfg.ToMetadata())),
      config_(ModelConfig::FromMetadata(metadata_)),
      tensors_(std::move(tensors)) {
  Validate();
}

ModelWeights::ModelWeights(KeyValues metadata, std::vector<NamedTensor> tensors)
    : metadata_(std::move(metadata)),
      config_(ModelConfig::FromMetadata(metadata_)),
      tensors_(std::move(tensors)) {
  Validate();
}

const Tensor* ModelWeights::Find(std::string_view name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return &t.tensor;
  return nullptr;
}

const Tensor& ModelWeights::Get(std::string_view name) const {
  const Tensor* t = Find(name);
  if (!t) throw ShapeError("weights: missing tensor '" + std::string(name) + "'");
  return *t;
}

void ModelWeights::Validate() const {
  std::set<std::string> expected;
  for (const auto& layer : ModelLayers(config_))
    for (const auto& spec : LayerTensors(layer)) {
      expected.insert(spec.name);
      const Tensor* t = Find(spec.name);
      if (!t)
        throw ShapeError("weights: missing tensor '" + spec.name + "'");
      if (t->shape() != spec.shape)
        throw ShapeError("weights: tensor '" + spec.name + "' has shape " +
                         Tensor::ShapeString(t->shape()) + ", expected " +
                         Tensor::ShapeString(spec.shape));
    }
  std::set<std::string> seen;
  for (const auto& t : tensors_) {
    if (!seen.insert(t.name).second)
      throw FormatError("weights: duplicate tensor '" + t.name + "'");
    if (!expected.count(t.name))
      throw ShapeError("weights: unexpected tensor '" + t.name + "'");
  }
}

std::vector<std::uint8_t> SaveWeights(const ModelWeights& weights) {
  Writer w;
  w.Bytes(kWeightsMagic, 4);
  w.Pod<std::uint32_t>(kWeightsVersion);
  const std::string meta = weights.metadata().Format();
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
  w.Bytes(meta.data(), meta.size());
  w.Pod<std::uint32_t>(static_cast<std::uint32_t>(weights.tensors().size()));
  for (const auto& [name, tensor] : weights.tensors()) {
    w.Pod<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.Bytes(name.data(), name.size());
    w.Pod<std::uint8_t>(static_cast<std::uint8_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) w.Pod<std::uint32_t>(static_cast<std::uint32_t>(d));
    w.Bytes(tensor.ptr(), tensor.size() * sizeof(float));
  }
  return w.Take();
}

ModelWeights LoadWeights(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kWeightsMagic, 4) != 0)
    throw FormatError("weights: bad magic, not a DFW2 container");
  r.String(4, "magic");
  const auto version = r.Pod<std::uint32_t>("version");
  if (version != kWeightsVersion)
    throw FormatError("weights: unsupported version " + std::to_string(version));
  const auto meta_len = r.Pod<std::uint32_t>("metadata length");
  const std::string meta = r.String(meta_len, "metadata");
  KeyValues kv;
  try {
    kv = KeyValues::Parse(meta);
  } catch (const Error& e) {
    throw FormatError(std::string("weights: bad metadata: ") + e.what());
  }
  const auto count = r.Pod<std::uint32_t>("tensor count");
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.Pod<std::uint16_t>("tensor name length");
    std::string name = r.String(name_len, "tensor name");
    const auto rank = r.Pod<std::uint8_t>("tensor rank");
    if (rank == 0 || rank > 4)
      throw FormatError("weights: tensor '" + name + "' has rank " +
                        std::to_string(rank));
    Tensor::Shape shape(rank);
    std::size_t elements = 1;
    for (auto& d : shape) {
      d = r.Pod<std::uint32_t>("tensor dims");
      elements *= d;
    }
    if (elements > r.remaining() / sizeof(float))
      throw TruncatedError("weights: truncated data for tensor '" + name + "'");
    std::vector<float> data(elements);
    r.Bytes(data.data(), elements * sizeof(float), "tensor data");
    tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
  }
  if (r.remaining() != 0)
    throw FormatError("weights: " + std::to_string(r.remaining()) +
                      " trailing bytes after " + std::to_string(count) +
                      " tensors");
  try {
    return ModelWeights(std::move(kv), std::move(tensors));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("weights: invalid config in metadata: ") +
                      e.what());
  }
}

void SaveWeightsFile(const ModelWeights& weights, const std::string& path) {
  const auto bytes = SaveWeights(weights);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

ModelWeights LoadWeightsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return LoadWeights(bytes);
}

ModelWeights RandomWeights(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  std::mt19937_64 rng(seed);
  std::vector<NamedTensor> tensors;
  for (const auto& layer : ModelLayers(cfg)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(FanIn(layer)));
    for (const auto& spec : LayerTensors(layer)) {
      Tensor t(spec.shape);
      for (float& v : t.data()) v = static_cast<float>(bound * UniformSigned(rng));
      tensors.push_back({spec.name, std::move(t)});
    }
  }
  return ModelWeights(cfg, std::move(tensors));
}

ModelWeights IdentityWeights(const ModelConfig& cfg) {
  cfg.Validate();
  std::vector<NamedTensor> tensors;
  for (const auto& layer : ModelLayers(cfg))
    for (const auto& spec : LayerTensors(layer))
      tensors.push_back({spec.name, Tensor(spec.shape)});
  auto fill = [&](const std::string& name, auto&& fn) {
    for (auto& t : tensors)
      if (t.name == name) fn(t.tensor);
  };
  // sigmoid(40) rounds to exactly 1.0f.
  fill("erb_dec.conv0_out.bias", [](Tensor& t) {
    for (float& v : t.data()) v = 40.0f;
  });
  // Output layout [bin][tap][re, im].
  fill("df_dec.out.bias", [&](Tensor& t) {
    for (int f = 0; f < cfg.df.n_df_bins; ++f)
      t[(static_cast<std::size_t>(f) * cfg.df.order + cfg.df.lookahead) * 2] = 1.0f;
  });
  return ModelWeights(cfg, std::move(tensors));
}

}  // namespace dfn
