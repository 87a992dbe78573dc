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

#ifndef VDEPTH_AFFINE_STITCHER_H_
#define VDEPTH_AFFINE_STITCHER_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vdepth/tensor.h"

namespace vdepth {

// Default sliding-window schedule for long videos.
inline constexpr std::size_t kDefaultWindowSize = 45;
inline constexpr std::size_t kDefaultStride = 9;

// x -> scale * x + shift
struct AffineParams {
  double scale = 1.0;
  double shift = 0.0;

  double operator()(double x) const { return scale * x + shift; }
  friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

// Overlapping window schedule over frame_count frames. starts[k] is the first
// frame of window k; every window spans window_length() frames.
struct WindowPlan {
  std::size_t frame_count = 0;
  std::size_t window_size = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> starts;

  std::size_t window_length() const { return std::min(window_size, frame_count); }
  // Overlap of two interior windows. The final pair can overlap more because
  // the last start is clamped to frame_count - window_size.
  std::size_t overlap() const { return window_size - stride; }
};

// starts = 0, stride, 2*stride, ..., with the final start clamped to
// frame_count - window_size. A sequence shorter than the window gets one
// window covering all of it. Throws ConfigError if stride is 0 or
// >= window_size, or if frame_count or window_size is 0.
WindowPlan plan_windows(std::size_t frame_count, std::size_t window_size,
                        std::size_t stride);
// Same plan parameterised by the interior overlap (stride = window - overlap).
WindowPlan plan_windows_with_overlap(std::size_t frame_count,
                                     std::size_t window_size,
                                     std::size_t overlap);

// Depth predicted for one window; depth.frame_count() == plan.window_length().
struct WindowPrediction {
  std::size_t start = 0;
  DepthSequence depth;
};

// Var(b) <= kDegeneracyRatio * mean(|b|)^2 makes an overlap degenerate.
inline constexpr double kDegeneracyRatio = 1e-12;

// Least-squares (s, t) minimising ||s*b + t - a||^2 over pixels where valid
// is nonzero (all pixels if valid is empty):
//   s = Cov(a, b) / Var(b),  t = mean(a) - s * mean(b).
// Throws DegenerateOverlap if fewer than two pixels are valid or b is
// (numerically) constant; ShapeError on length mismatch.
AffineParams fit_affine(std::span<const double> a, std::span<const double> b,
                        std::span<const std::uint8_t> valid = {});

// Sum of squared residuals of s*b + t - a over valid pixels.
double affine_residual_sum(std::span<const double> a, std::span<const double> b,
                           AffineParams p,
                           std::span<const std::uint8_t> valid = {});

// Maps every valid pixel through p; masks are preserved.
DepthMap apply_affine(const DepthMap& map, AffineParams p);
DepthSequence apply_affine(const DepthSequence& seq, AffineParams p);

// out[i] = prev[i] + w_i * (cur[i] - prev[i]), w_i = (i + 1) / (O + 1). A
// pixel valid in only one source takes that source's value.
std::vector<DepthMap> blend_overlap(std::span<const DepthMap> prev,
                                    std::span<const DepthMap> cur);

struct WindowFit {
  std::size_t window = 0;
  std::size_t start = 0;
  std::size_t overlap_frames = 0;
  std::size_t valid_pixels = 0;
  AffineParams params;
  bool fallback = false;  // degenerate overlap, identity used
  std::string note;
};

struct StitchResult {
  DepthSequence depth;
  std::vector<WindowFit> fits;  // one per window after the first
};

// Chains windows into one sequence in the frame of the first window. Each
// later window is fitted against the already stitched frames it overlaps,
// mapped through the fit, blended over the overlap and its tail appended.
// Degenerate overlaps fall back to identity and are flagged in fits.
// Throws ConfigError if windows do not match the plan.
StitchResult stitch_sequence(std::span<const WindowPrediction> windows,
                             const WindowPlan& plan);

}  // namespace vdepth

#endif  // VDEPTH_AFFINE_STITCHER_H_
