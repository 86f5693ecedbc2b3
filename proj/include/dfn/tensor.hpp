// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dfn/error.hpp"

namespace dfn {

// Dense row-major float32 tensor of rank <= 4. Activations use the
// [channel][time][freq] layout.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f)
      : shape_(CheckShape(std::move(shape))), data_(Count(shape_), fill) {}
  Tensor(Shape shape, std::vector<float> data)
      : shape_(CheckShape(std::move(shape))), data_(std::move(data)) {
    if (data_.size() != Count(shape_))
      throw ShapeError("tensor: data length " + std::to_string(data_.size()) +
                       " does not match shape " + ShapeString(shape_));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  float* ptr() { return data_.data(); }
  const float* ptr() const { return data_.data(); }
  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  bool AllFinite() const {
    for (float v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static std::size_t Count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  static std::string ShapeString(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

  bool operator==(const Tensor&) const = default;

 private:
  static Shape CheckShape(Shape shape) {
    if (shape.empty() || shape.size() > 4)
      throw ShapeError("tensor: rank must be in [1, 4], got " +
                       std::to_string(shape.size()));
    return shape;
  }

  Shape shape_;
  std::vector<float> data_;
};

}  // namespace dfn
