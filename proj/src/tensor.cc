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

#include "vdepth/tensor.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {

std::string Shape4::ToString() const {
  return fmt::format("{}x{}x{}x{}", frames, channels, height, width);
}

Tensor4::Tensor4(Shape4 shape, double fill)
    : shape_(shape), values_(shape.count(), fill) {}

Tensor4::Tensor4(Shape4 shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.count()) {
    throw ShapeError(fmt::format("tensor {} needs {} values, got {}",
                                 shape_.ToString(), shape_.count(),
                                 values_.size()));
  }
}

LatentSequence::LatentSequence(Tensor4 tensor) : tensor_(std::move(tensor)) {
  if (tensor_.empty()) {
    throw ShapeError("latent sequence has a zero extent: " +
                     tensor_.shape().ToString());
  }
  for (double v : tensor_.values()) {
    if (!std::isfinite(v)) throw DomainError("latent sequence value is not finite");
  }
}

DepthMap::DepthMap(std::size_t height, std::size_t width, double fill)
    : height_(height),
      width_(width),
      values_(height * width, fill),
      valid_(height * width, 1) {}

DepthMap::DepthMap(std::size_t height, std::size_t width,
                   std::vector<double> values)
    : DepthMap(height, width, std::move(values),
               std::vector<std::uint8_t>(height * width, 1)) {}

DepthMap::DepthMap(std::size_t height, std::size_t width,
                   std::vector<double> values, std::vector<std::uint8_t> valid)
    : height_(height),
      width_(width),
      values_(std::move(values)),
      valid_(std::move(valid)) {
  if (values_.size() != height * width || valid_.size() != height * width) {
    throw ShapeError(fmt::format(
        "depth map {}x{} needs {} values and mask entries, got {} and {}",
        height, width, height * width, values_.size(), valid_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (valid_[k] && !std::isfinite(values_[k])) {
      throw DomainError("valid depth pixel holds a non-finite value");
    }
  }
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(valid_.begin(), valid_.end(), [](auto v) { return v != 0; }));
}

bool operator==(const DepthMap& a, const DepthMap& b) {
  if (!a.same_shape(b) || a.valid_ != b.valid_) return false;
  for (std::size_t k = 0; k < a.values_.size(); ++k) {
    if (a.valid_[k] && a.values_[k] != b.values_[k]) return false;
  }
  return true;
}

DepthSequence::DepthSequence(std::vector<DepthMap> frames)
    : frames_(std::move(frames)) {
  if (frames_.empty()) throw ShapeError("depth sequence has no frames");
  for (const DepthMap& m : frames_) {
    if (!m.same_shape(frames_.front())) {
      throw ShapeError(fmt::format(
          "depth sequence frames differ in shape ({}x{} vs {}x{})", m.height(),
          m.width(), frames_.front().height(), frames_.front().width()));
    }
  }
}

SpatialDifferentials spatial_differentials(const Tensor4& x) {
  const Shape4& s = x.shape();
  const std::size_t hm = s.height > 0 ? s.height - 1 : 0;
  const std::size_t wm = s.width > 0 ? s.width - 1 : 0;
  SpatialDifferentials out{Tensor4({s.frames, s.channels, hm, s.width}),
                           Tensor4({s.frames, s.channels, s.height, wm})};
  for (std::size_t f = 0; f < s.frames; ++f) {
    for (std::size_t c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i < hm; ++i) {
        for (std::size_t j = 0; j < s.width; ++j) {
          out.dh(f, c, i, j) = x(f, c, i + 1, j) - x(f, c, i, j);
        }
      }
      for (std::size_t i = 0; i < s.height; ++i) {
        for (std::size_t j = 0; j < wm; ++j) {
          out.dw(f, c, i, j) = x(f, c, i, j + 1) - x(f, c, i, j);
        }
      }
    }
  }
  return out;
}

Tensor4 temporal_differentials(const Tensor4& x) {
  const Shape4& s = x.shape();
  const std::size_t fm = s.frames > 0 ? s.frames - 1 : 0;
  Tensor4 out({fm, s.channels, s.height, s.width});
  const std::size_t frame_len = s.channels * s.height * s.width;
  auto src = x.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < fm * frame_len; ++k) {
    dst[k] = src[k + frame_len] - src[k];
  }
  return out;
}

}  // namespace vdepth
