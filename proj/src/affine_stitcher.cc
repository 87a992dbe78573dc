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

#include "vdepth/affine_stitcher.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {
namespace {

void CheckLengths(std::span<const double> a, std::span<const double> b,
                  std::span<const std::uint8_t> valid) {
  if (a.size() != b.size() || (!valid.empty() && valid.size() != a.size())) {
    throw ShapeError(fmt::format("affine fit inputs differ in length ({}, {}, mask {})",
                                 a.size(), b.size(), valid.size()));
  }
}

}  // namespace

WindowPlan plan_windows(std::size_t frame_count, std::size_t window_size,
                        std::size_t stride) {
  if (frame_count == 0) throw ConfigError("cannot plan windows over zero frames");
  if (window_size == 0) throw ConfigError("window size must be positive");
  if (stride == 0 || stride >= window_size) {
    throw ConfigError(fmt::format(
        "stride {} must be in [1, window size {}) so consecutive windows overlap",
        stride, window_size));
  }
  WindowPlan plan{frame_count, window_size, stride, {0}};
  if (frame_count <= window_size) return plan;
  const std::size_t last = frame_count - window_size;
  while (plan.starts.back() < last) {
    plan.starts.push_back(std::min(plan.starts.back() + stride, last));
  }
  return plan;
}

WindowPlan plan_windows_with_overlap(std::size_t frame_count,
                                     std::size_t window_size,
                                     std::size_t overlap) {
  if (overlap == 0 || overlap >= window_size) {
    throw ConfigError(fmt::format("overlap {} must be in [1, window size {})",
                                  overlap, window_size));
  }
  return plan_windows(frame_count, window_size, window_size - overlap);
}

AffineParams fit_affine(std::span<const double> a, std::span<const double> b,
                        std::span<const std::uint8_t> valid) {
  CheckLengths(a, b, valid);
  auto use = [&](std::size_t k) { return valid.empty() || valid[k] != 0; };

  std::size_t n = 0;
  double sum_a = 0.0, sum_b = 0.0, sum_abs_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!use(k)) continue;
    ++n;
    sum_a += a[k];
    sum_b += b[k];
    sum_abs_b += std::abs(b[k]);
  }
  if (n < 2) {
    throw DegenerateOverlap(fmt::format("affine fit needs >= 2 valid pixels, got {}", n));
  }
  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);
  const double mean_abs_b = sum_abs_b / static_cast<double>(n);

  double cov = 0.0, var = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!use(k)) continue;
    const double db = b[k] - mean_b;
    cov += (a[k] - mean_a) * db;
    var += db * db;
  }
  cov /= static_cast<double>(n);
  var /= static_cast<double>(n);
  if (!(var > kDegeneracyRatio * mean_abs_b * mean_abs_b)) {
    throw DegenerateOverlap(fmt::format(
        "overlap is constant (variance {:.3g}, mean |d| {:.3g})", var, mean_abs_b));
  }
  const double s = cov / var;
  return {s, mean_a - s * mean_b};
}

double affine_residual_sum(std::span<const double> a, std::span<const double> b,
                           AffineParams p, std::span<const std::uint8_t> valid) {
  CheckLengths(a, b, valid);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!valid.empty() && valid[k] == 0) continue;
    const double r = p(b[k]) - a[k];
    sum += r * r;
  }
  return sum;
}

DepthMap apply_affine(const DepthMap& map, AffineParams p) {
  if (!std::isfinite(p.scale) || !std::isfinite(p.shift)) {
    throw DomainError("affine parameters must be finite");
  }
  DepthMap out = map;
  auto values = out.values();
  auto mask = out.mask();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (mask[k]) values[k] = p(values[k]);
  }
  return out;
}

DepthSequence apply_affine(const DepthSequence& seq, AffineParams p) {
  std::vector<DepthMap> frames;
  frames.reserve(seq.frame_count());
  for (const DepthMap& m : seq.frames()) frames.push_back(apply_affine(m, p));
  return DepthSequence(std::move(frames));
}

std::vector<DepthMap> blend_overlap(std::span<const DepthMap> prev,
                                    std::span<const DepthMap> cur) {
  if (prev.size() != cur.size() || prev.empty()) {
    throw ShapeError(fmt::format("blend needs two equal, nonempty frame lists (got {} and {})",
                                 prev.size(), cur.size()));
  }
  const double denom = static_cast<double>(prev.size() + 1);
  std::vector<DepthMap> out;
  out.reserve(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (!prev[i].same_shape(cur[i])) throw ShapeError("blend frames differ in shape");
    const double w = static_cast<double>(i + 1) / denom;
    DepthMap m = prev[i];
    auto values = m.values();
    auto mask = m.mask();
    const auto cv = cur[i].values();
    const auto cm = cur[i].mask();
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (mask[k] && cm[k]) {
        values[k] += w * (cv[k] - values[k]);
      } else if (cm[k]) {
        values[k] = cv[k];
        mask[k] = 1;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

StitchResult stitch_sequence(std::span<const WindowPrediction> windows,
                             const WindowPlan& plan) {
  if (windows.size() != plan.starts.size()) {
    throw ConfigError(fmt::format("plan has {} windows but {} were provided",
                                  plan.starts.size(), windows.size()));
  }
  const std::size_t len = plan.window_length();
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (windows[k].start != plan.starts[k]) {
      throw ConfigError(fmt::format("window {} starts at frame {}, plan expects {}", k,
                                    windows[k].start, plan.starts[k]));
    }
    if (windows[k].depth.frame_count() != len) {
      throw ShapeError(fmt::format("window {} has {} frames, expected {}", k,
                                   windows[k].depth.frame_count(), len));
    }
    if (!windows[k].depth[0].same_shape(windows[0].depth[0])) {
      throw ShapeError(fmt::format("window {} differs in spatial shape", k));
    }
  }

  std::vector<DepthMap> out = windows[0].depth.frames();
  std::vector<WindowFit> fits;
  for (std::size_t k = 1; k < windows.size(); ++k) {
    const std::size_t start = windows[k].start;
    const std::size_t covered = out.size();
    const std::size_t overlap = covered - start;
    const DepthSequence& cur = windows[k].depth;

    // Flatten the overlap, stitched side as reference.
    std::vector<double> ref, src;
    std::vector<std::uint8_t> valid;
    for (std::size_t i = 0; i < overlap; ++i) {
      const DepthMap& a = out[start + i];
      const DepthMap& b = cur[i];
      ref.insert(ref.end(), a.values().begin(), a.values().end());
      src.insert(src.end(), b.values().begin(), b.values().end());
      for (std::size_t p = 0; p < a.size(); ++p) {
        valid.push_back(a.mask()[p] && b.mask()[p] ? 1 : 0);
      }
    }

    WindowFit fit{k, start, overlap,
                  static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1)),
                  {}, false, {}};
    try {
      fit.params = fit_affine(ref, src, valid);
    } catch (const DegenerateOverlap& e) {
      fit.params = AffineParams{};
      fit.fallback = true;
      fit.note = e.what();
    }

    const DepthSequence aligned = apply_affine(cur, fit.params);
    const std::vector<DepthMap> blended = blend_overlap(
        std::span<const DepthMap>(out).subspan(start, overlap),
        std::span<const DepthMap>(aligned.frames()).first(overlap));
    std::copy(blended.begin(), blended.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
    out.insert(out.end(), aligned.frames().begin() + static_cast<std::ptrdiff_t>(overlap),
               aligned.frames().end());
    fits.push_back(std::move(fit));
  }
  return {DepthSequence(std::move(out)), std::move(fits)};
}

}  // namespace vdepth
