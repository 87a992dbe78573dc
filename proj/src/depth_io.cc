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

#include "vdepth/depth_io.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {
namespace {

// Upper bound on pixel / element count accepted from a file header.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 31;

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t GetU32(const std::uint8_t* p, bool little_endian = true) {
  if (little_endian) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
           std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
  }
  return std::uint32_t{p[3]} | std::uint32_t{p[2]} << 8 |
         std::uint32_t{p[1]} << 16 | std::uint32_t{p[0]} << 24;
}

void PutF32(std::vector<std::uint8_t>& out, float v) {
  PutU32(out, std::bit_cast<std::uint32_t>(v));
}

float GetF32(const std::uint8_t* p, bool little_endian = true) {
  return std::bit_cast<float>(GetU32(p, little_endian));
}

float NarrowForStorage(double v) {
  const auto f = static_cast<float>(v);
  if (std::isfinite(v) && !std::isfinite(f)) {
    throw FormatError(fmt::format("value {} does not fit in f32", v));
  }
  return f;
}

// Reads valid pixels as float, invalid ones as NaN.
std::vector<float> ToStorage(const DepthMap& map) {
  std::vector<float> out(map.size());
  auto values = map.values();
  auto mask = map.mask();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = mask[k] ? NarrowForStorage(values[k])
                     : std::numeric_limits<float>::quiet_NaN();
  }
  return out;
}

DepthMap FromStorage(std::size_t height, std::size_t width,
                     std::span<const float> stored) {
  std::vector<double> values(stored.size(), 0.0);
  std::vector<std::uint8_t> valid(stored.size(), 0);
  for (std::size_t k = 0; k < stored.size(); ++k) {
    if (std::isfinite(stored[k])) {
      values[k] = stored[k];
      valid[k] = 1;
    }
  }
  return DepthMap(height, width, std::move(values), std::move(valid));
}

// ---------------------------------------------------------------- PFM

class HeaderCursor {
 public:
  explicit HeaderCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string_view Token() {
    while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
    const std::size_t begin = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) ++pos_;
    if (begin == pos_) throw FormatError("pfm: truncated header");
    return {reinterpret_cast<const char*>(bytes_.data()) + begin, pos_ - begin};
  }

  // The data block starts after exactly one whitespace byte.
  std::size_t DataOffset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("pfm: missing separator before pixel data");
    }
    return pos_ + 1;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
T ParseNumber(std::string_view token, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(fmt::format("pfm: bad {} '{}'", what, token));
  }
  return value;
}

DepthMap ReadPfm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  HeaderCursor cursor(bytes);
  const std::string_view magic = cursor.Token();
  if (magic == "PF") throw FormatError("pfm: colour PFM is not a depth map");
  if (magic != "Pf") throw FormatError("pfm: bad magic in " + path.string());
  const auto width = ParseNumber<std::uint64_t>(cursor.Token(), "width");
  const auto height = ParseNumber<std::uint64_t>(cursor.Token(), "height");
  const auto scale = ParseNumber<double>(cursor.Token(), "scale");
  if (!std::isfinite(scale) || scale == 0.0) {
    throw FormatError("pfm: scale must be finite and nonzero");
  }
  if (width == 0 || height == 0 || width > kMaxElements ||
      height > kMaxElements || width * height > kMaxElements) {
    throw FormatError(fmt::format("pfm: dimensions {}x{} out of range", width, height));
  }
  const std::size_t offset = cursor.DataOffset();
  const std::uint64_t need = width * height * 4;
  if (bytes.size() - offset < need) {
    throw FormatError(fmt::format("pfm: payload has {} bytes, header needs {}",
                                  bytes.size() - offset, need));
  }
  const bool little = scale < 0.0;
  std::vector<float> stored(width * height);
  for (std::uint64_t r = 0; r < height; ++r) {
    const std::uint64_t row = height - 1 - r;  // bottom-up
    for (std::uint64_t c = 0; c < width; ++c) {
      stored[row * width + c] = GetF32(&bytes[offset + 4 * (r * width + c)], little);
    }
  }
  return FromStorage(height, width, stored);
}

void WritePfm(const DepthMap& map, const std::filesystem::path& path) {
  const std::vector<float> stored = ToStorage(map);
  const std::string header = fmt::format("Pf\n{} {}\n-1\n", map.width(), map.height());
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + 4 * stored.size());
  for (std::size_t r = map.height(); r-- > 0;) {
    for (std::size_t c = 0; c < map.width(); ++c) PutF32(bytes, stored[r * map.width() + c]);
  }
  WriteFileBytes(path, bytes);
}

// ---------------------------------------------------------------- png16

double CheckPngScale(std::optional<double> scale) {
  if (!scale) throw ConfigError("png16 requires a scale factor");
  if (!std::isfinite(*scale) || *scale <= 0.0) {
    throw ConfigError(fmt::format("png16 scale must be positive and finite, got {}", *scale));
  }
  return *scale;
}

struct PngMemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void PngReadFromMemory(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
  if (reader->bytes.size() - reader->pos < length) {
    png_error(png, "unexpected end of file");
  }
  std::memcpy(out, reader->bytes.data() + reader->pos, length);
  reader->pos += length;
}

void PngWriteToMemory(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void PngFlushNoop(png_structp) {}

void PngWarningSilent(png_structp, png_const_charp) {}

// Decodes a 16-bit grayscale PNG into native-endian samples. Returns false
// and fills *error on failure. No C++ object is constructed between setjmp
// and the last libpng call.
bool DecodePng16(std::span<const std::uint8_t> bytes, std::uint32_t* width,
                 std::uint32_t* height, std::vector<std::uint16_t>* samples,
                 const char** error) {
  PngMemoryReader reader{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, PngWarningSilent);
  if (png == nullptr) {
    *error = "cannot allocate png reader";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    *error = "cannot allocate png info";
    return false;
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    *error = "corrupt png stream";
    return false;
  }
  png_set_read_fn(png, &reader, PngReadFromMemory);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth != 16 || color != PNG_COLOR_TYPE_GRAY ||
      png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    png_destroy_read_struct(&png, &info, nullptr);
    *error = "png16 needs a non-interlaced 16-bit grayscale image";
    return false;
  }
  if (std::uint64_t{w} * h > kMaxElements) {
    png_destroy_read_struct(&png, &info, nullptr);
    *error = "png dimensions out of range";
    return false;
  }
  if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);
  samples->assign(std::size_t{w} * h, 0);
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r) {
    rows[r] = reinterpret_cast<png_bytep>(samples->data() + std::size_t{r} * w);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  *width = w;
  *height = h;
  return true;
}

bool EncodePng16(std::uint32_t width, std::uint32_t height,
                 std::span<const std::uint16_t> samples,
                 std::vector<std::uint8_t>* out, const char** error) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, PngWarningSilent);
  if (png == nullptr) {
    *error = "cannot allocate png writer";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    *error = "cannot allocate png info";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    *error = "png encoding failed";
    return false;
  }
  png_set_write_fn(png, out, PngWriteToMemory, PngFlushNoop);
  png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
  for (std::uint32_t r = 0; r < height; ++r) {
    png_write_row(png, reinterpret_cast<png_const_bytep>(samples.data() +
                                                         std::size_t{r} * width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

DepthMap ReadPng16(const std::filesystem::path& path, double scale) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  std::uint32_t width = 0, height = 0;
  std::vector<std::uint16_t> samples;
  const char* error = nullptr;
  if (!DecodePng16(bytes, &width, &height, &samples, &error)) {
    throw FormatError(fmt::format("{}: {}", path.string(), error));
  }
  std::vector<double> values(samples.size(), 0.0);
  std::vector<std::uint8_t> valid(samples.size(), 0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k] != 0) {
      values[k] = samples[k] * scale;
      valid[k] = 1;
    }
  }
  return DepthMap(height, width, std::move(values), std::move(valid));
}

void WritePng16(const DepthMap& map, const std::filesystem::path& path,
                double scale) {
  if (map.width() > std::numeric_limits<std::uint32_t>::max() ||
      map.height() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("png16: dimensions out of range");
  }
  std::vector<std::uint16_t> samples(map.size(), 0);
  auto values = map.values();
  auto mask = map.mask();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!mask[k]) continue;
    const double q = std::nearbyint(values[k] / scale);
    // A valid pixel must not collide with the invalid sentinel 0.
    if (!(q >= 1.0 && q <= 65535.0)) {
      throw FormatError(fmt::format(
          "png16: depth {} with scale {} is outside the encodable range [{}, {}]",
          values[k], scale, scale, 65535.0 * scale));
    }
    samples[k] = static_cast<std::uint16_t>(q);
  }
  std::vector<std::uint8_t> bytes;
  const char* error = nullptr;
  if (!EncodePng16(static_cast<std::uint32_t>(map.width()),
                   static_cast<std::uint32_t>(map.height()), samples, &bytes,
                   &error)) {
    throw FormatError(fmt::format("{}: {}", path.string(), error));
  }
  WriteFileBytes(path, bytes);
}

}  // namespace

// ---------------------------------------------------------------- names

DepthFormat ParseDepthFormat(std::string_view name) {
  if (name == "pfm") return DepthFormat::kPfm;
  if (name == "png16" || name == "png") return DepthFormat::kPng16;
  if (name == "raw") return DepthFormat::kRaw;
  throw ConfigError(fmt::format("unknown depth format '{}'", name));
}

std::string_view FormatName(DepthFormat format) {
  switch (format) {
    case DepthFormat::kPfm: return "pfm";
    case DepthFormat::kPng16: return "png16";
    case DepthFormat::kRaw: return "raw";
  }
  return "?";
}

std::string_view FormatExtension(DepthFormat format) {
  switch (format) {
    case DepthFormat::kPfm: return ".pfm";
    case DepthFormat::kPng16: return ".png";
    case DepthFormat::kRaw: return ".raw";
  }
  return "";
}

std::optional<DepthFormat> FormatFromPath(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") return DepthFormat::kPfm;
  if (ext == ".png") return DepthFormat::kPng16;
  if (ext == ".raw") return DepthFormat::kRaw;
  return std::nullopt;
}

// ---------------------------------------------------------------- raw

std::uint64_t TensorFileHeader::element_count() const {
  std::uint64_t n = 1;
  for (std::uint32_t d : dims) {
    if (d != 0 && n > kMaxElements / d) return kMaxElements + 1;
    n *= d;
  }
  return n;
}

RawTensor read_raw_tensor(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  if (bytes.size() < 8 || !std::equal(kRawMagic.begin(), kRawMagic.end(), bytes.begin())) {
    throw FormatError("raw: bad magic in " + path.string());
  }
  RawTensor t;
  const std::uint32_t rank = GetU32(&bytes[4]);
  if (rank > 16) throw FormatError(fmt::format("raw: rank {} out of range", rank));
  const std::size_t header_size = 8 + 4 * std::size_t{rank};
  if (bytes.size() < header_size) throw FormatError("raw: truncated header");
  for (std::uint32_t r = 0; r < rank; ++r) t.header.dims.push_back(GetU32(&bytes[8 + 4 * r]));
  const std::uint64_t n = t.header.element_count();
  if (n > kMaxElements) throw FormatError("raw: dimensions out of range");
  if (bytes.size() - header_size != 4 * n) {
    throw FormatError(fmt::format("raw: payload has {} bytes, header needs {}",
                                  bytes.size() - header_size, 4 * n));
  }
  t.payload.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) t.payload[k] = GetF32(&bytes[header_size + 4 * k]);
  return t;
}

void write_raw_tensor(const std::filesystem::path& path,
                      std::span<const std::uint32_t> dims,
                      std::span<const float> payload) {
  TensorFileHeader header;
  header.dims.assign(dims.begin(), dims.end());
  if (header.element_count() != payload.size()) {
    throw ShapeError("raw: payload length does not match dims");
  }
  std::vector<std::uint8_t> bytes(kRawMagic.begin(), kRawMagic.end());
  bytes.reserve(8 + 4 * dims.size() + 4 * payload.size());
  PutU32(bytes, header.rank());
  for (std::uint32_t d : dims) PutU32(bytes, d);
  for (float v : payload) PutF32(bytes, v);
  WriteFileBytes(path, bytes);
}

Tensor4 read_tensor4(const std::filesystem::path& path) {
  RawTensor raw = read_raw_tensor(path);
  const auto& dims = raw.header.dims;
  if (dims.size() > 4) {
    throw FormatError(fmt::format("raw: expected rank <= 4, got {}", dims.size()));
  }
  std::array<std::size_t, 4> ext{1, 1, 1, 1};
  std::copy(dims.begin(), dims.end(), ext.begin() + (4 - dims.size()));
  std::vector<double> values(raw.payload.begin(), raw.payload.end());
  return Tensor4({ext[0], ext[1], ext[2], ext[3]}, std::move(values));
}

void write_tensor4(const std::filesystem::path& path, const Tensor4& tensor) {
  const Shape4& s = tensor.shape();
  for (std::size_t d : {s.frames, s.channels, s.height, s.width}) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw FormatError("raw: extent does not fit in u32");
    }
  }
  const std::array<std::uint32_t, 4> dims{
      static_cast<std::uint32_t>(s.frames), static_cast<std::uint32_t>(s.channels),
      static_cast<std::uint32_t>(s.height), static_cast<std::uint32_t>(s.width)};
  std::vector<float> payload(tensor.size());
  std::transform(tensor.values().begin(), tensor.values().end(), payload.begin(),
                 NarrowForStorage);
  write_raw_tensor(path, dims, payload);
}

// ---------------------------------------------------------------- maps

DepthMap read_depth_map(const std::filesystem::path& path, DepthFormat format,
                        std::optional<double> png16_scale) {
  switch (format) {
    case DepthFormat::kPfm:
      return ReadPfm(path);
    case DepthFormat::kPng16:
      return ReadPng16(path, CheckPngScale(png16_scale));
    case DepthFormat::kRaw: {
      RawTensor raw = read_raw_tensor(path);
      const auto& dims = raw.header.dims;
      if (dims.size() < 2 ||
          !std::all_of(dims.begin(), dims.end() - 2, [](auto d) { return d == 1; })) {
        throw FormatError("raw: depth map must have shape (height, width)");
      }
      return FromStorage(dims[dims.size() - 2], dims.back(), raw.payload);
    }
  }
  throw ConfigError("unknown depth format");
}

void write_depth_map(const DepthMap& map, const std::filesystem::path& path,
                     DepthFormat format, std::optional<double> png16_scale) {
  if (map.size() == 0) throw ShapeError("cannot write an empty depth map");
  switch (format) {
    case DepthFormat::kPfm:
      WritePfm(map, path);
      return;
    case DepthFormat::kPng16:
      WritePng16(map, path, CheckPngScale(png16_scale));
      return;
    case DepthFormat::kRaw: {
      if (map.width() > std::numeric_limits<std::uint32_t>::max() ||
          map.height() > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError("raw: dimensions out of range");
      }
      const std::array<std::uint32_t, 2> dims{static_cast<std::uint32_t>(map.height()),
                                              static_cast<std::uint32_t>(map.width())};
      write_raw_tensor(path, dims, ToStorage(map));
      return;
    }
  }
}

}  // namespace vdepth
