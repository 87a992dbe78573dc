// Copyright 2026 The vdepth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VDEPTH_TENSOR_H_
#define VDEPTH_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vdepth {

// Extents of a frames x channels x height x width tensor. Any extent may be
// zero; such a tensor is empty.
struct Shape4 {
  std::size_t frames = 0;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t count() const { return frames * channels * height * width; }
  std::string ToString() const;
  friend bool operator==(const Shape4&, const Shape4&) = default;
};

// Dense row-major real tensor of rank 4.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, double fill = 0.0);
  // Throws ShapeError if values.size() != shape.count().
  Tensor4(Shape4 shape, std::vector<double> values);

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::size_t index(std::size_t f, std::size_t c, std::size_t i,
                    std::size_t j) const {
    return ((f * shape_.channels + c) * shape_.height + i) * shape_.width + j;
  }
  double operator()(std::size_t f, std::size_t c, std::size_t i,
                    std::size_t j) const {
    return values_[index(f, c, i, j)];
  }
  double& operator()(std::size_t f, std::size_t c, std::size_t i,
                     std::size_t j) {
    return values_[index(f, c, i, j)];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  Shape4 shape_;
  std::vector<double> values_;
};

// Latent video tensor (f x C x h x w). All extents are at least one and all
// values are finite.
class LatentSequence {
 public:
  // Throws ShapeError on a zero extent, DomainError on a non-finite value.
  explicit LatentSequence(Tensor4 tensor);

  const Tensor4& tensor() const { return tensor_; }
  const Shape4& shape() const { return tensor_.shape(); }
  std::span<const double> values() const { return tensor_.values(); }
  operator const Tensor4&() const { return tensor_; }

 private:
  Tensor4 tensor_;
};

// One depth frame with a per-pixel validity mask. Values at invalid pixels
// carry no meaning and are ignored by comparisons.
class DepthMap {
 public:
  DepthMap() = default;
  // All pixels valid.
  DepthMap(std::size_t height, std::size_t width, double fill = 0.0);
  DepthMap(std::size_t height, std::size_t width, std::vector<double> values);
  // Throws ShapeError on size mismatch and DomainError if a valid pixel holds
  // a non-finite value.
  DepthMap(std::size_t height, std::size_t width, std::vector<double> values,
           std::vector<std::uint8_t> valid);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double at(std::size_t row, std::size_t col) const {
    return values_[row * width_ + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return values_[row * width_ + col];
  }
  bool valid(std::size_t row, std::size_t col) const {
    return valid_[row * width_ + col] != 0;
  }
  void set_valid(std::size_t row, std::size_t col, bool v) {
    valid_[row * width_ + col] = v ? 1 : 0;
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const std::uint8_t> mask() const { return valid_; }
  std::span<std::uint8_t> mask() { return valid_; }

  std::size_t valid_count() const;
  bool same_shape(const DepthMap& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  // Equal shape, equal mask, bit-equal values on valid pixels.
  friend bool operator==(const DepthMap& a, const DepthMap& b);

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

// Ordered depth frames sharing one spatial shape; never empty.
class DepthSequence {
 public:
  // Throws ShapeError if frames is empty or shapes differ.
  explicit DepthSequence(std::vector<DepthMap> frames);

  std::size_t frame_count() const { return frames_.size(); }
  std::size_t height() const { return frames_.front().height(); }
  std::size_t width() const { return frames_.front().width(); }

  const DepthMap& operator[](std::size_t f) const { return frames_[f]; }
  DepthMap& operator[](std::size_t f) { return frames_[f]; }
  const std::vector<DepthMap>& frames() const { return frames_; }

  bool same_shape(const DepthSequence& other) const {
    return frame_count() == other.frame_count() &&
           frames_.front().same_shape(other.frames_.front());
  }

  friend bool operator==(const DepthSequence&, const DepthSequence&) = default;

 private:
  std::vector<DepthMap> frames_;
};

struct SpatialDifferentials {
  Tensor4 dh;  // f x C x (h-1) x w
  Tensor4 dw;  // f x C x h x (w-1)
};

// Forward differences along the two spatial axes, interior positions only.
SpatialDifferentials spatial_differentials(const Tensor4& x);

// out[k] = x[k+1] - x[k]; empty for a single frame.
Tensor4 temporal_differentials(const Tensor4& x);

}  // namespace vdepth

#endif  // VDEPTH_TENSOR_H_
