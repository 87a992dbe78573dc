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

#ifndef VDEPTH_DEPTH_IO_H_
#define VDEPTH_DEPTH_IO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdepth/tensor.h"

namespace vdepth {

// Depth-map file formats.
//
//   pfm    "Pf" grayscale, little-endian (negative scale line), rows stored
//          bottom-up. Invalid pixels are written as NaN; any non-finite
//          value reads back as invalid.
//   png16  16-bit grayscale PNG, depth = pixel * scale. Pixel 0 is the
//          invalid sentinel.
//   raw    "DVDT" magic, u32 rank, rank x u32 dims, little-endian f32
//          payload. Depth maps are rank 2 (height, width), NaN = invalid.
//
// pfm and raw store 32-bit floats, so a round trip is exact for values that
// are representable as float.
enum class DepthFormat { kPfm, kPng16, kRaw };

// Accepts "pfm", "png16"/"png", "raw". Throws ConfigError otherwise.
DepthFormat ParseDepthFormat(std::string_view name);
std::string_view FormatName(DepthFormat format);
// File extension including the dot (".pfm", ".png", ".raw").
std::string_view FormatExtension(DepthFormat format);
// Guesses the format from a file extension; nullopt if unknown.
std::optional<DepthFormat> FormatFromPath(const std::filesystem::path& path);

// png16_scale is required (positive, finite) for kPng16 and ignored
// otherwise.
DepthMap read_depth_map(const std::filesystem::path& path, DepthFormat format,
                        std::optional<double> png16_scale = std::nullopt);
void write_depth_map(const DepthMap& map, const std::filesystem::path& path,
                     DepthFormat format,
                     std::optional<double> png16_scale = std::nullopt);

inline constexpr std::array<char, 4> kRawMagic = {'D', 'V', 'D', 'T'};

struct TensorFileHeader {
  std::array<char, 4> magic = kRawMagic;
  std::vector<std::uint32_t> dims;

  std::uint32_t rank() const { return static_cast<std::uint32_t>(dims.size()); }
  std::uint64_t element_count() const;
};

struct RawTensor {
  TensorFileHeader header;
  std::vector<float> payload;
};

RawTensor read_raw_tensor(const std::filesystem::path& path);
void write_raw_tensor(const std::filesystem::path& path,
                      std::span<const std::uint32_t> dims,
                      std::span<const float> payload);

// Rank <= 4 raw tensors; missing leading extents are taken as 1.
Tensor4 read_tensor4(const std::filesystem::path& path);
// Narrows to f32. Throws FormatError if a value does not fit.
void write_tensor4(const std::filesystem::path& path, const Tensor4& tensor);

}  // namespace vdepth

#endif  // VDEPTH_DEPTH_IO_H_
