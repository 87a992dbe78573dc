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

#ifndef VDEPTH_DEPTH_METRICS_H_
#define VDEPTH_DEPTH_METRICS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vdepth/affine_stitcher.h"
#include "vdepth/tensor.h"

namespace vdepth {

// Affine-invariant evaluation. Predictions are aligned to ground truth with
// the least-squares scale/shift in depth space, either once over the whole
// sequence or per frame, then scored on pixels valid in both maps.

enum class Granularity { kPerSequence, kPerFrame };

// Accepts "per_sequence" and "per_frame". Throws ConfigError otherwise.
Granularity ParseGranularity(std::string_view name);
std::string_view GranularityName(Granularity g);

// Depth-ratio thresholds for boundary pairs; scores are averaged over them.
inline constexpr std::array<double, 5> kDefaultBoundaryThresholds = {
    1.05, 1.10, 1.15, 1.20, 1.25};

inline constexpr double kDelta1Threshold = 1.25;

struct Alignment {
  DepthSequence aligned;              // validity = pred.valid && gt.valid
  std::vector<AffineParams> params;   // one entry, or one per frame
};

// Throws ShapeError on mismatched shapes, DegenerateOverlap if pred is
// constant over the fitted pixels.
Alignment align_for_eval(const DepthSequence& pred, const DepthSequence& gt,
                         Granularity granularity);

// mean |pred - gt| / gt over jointly valid pixels. Throws DomainError on
// gt <= 0 at such a pixel or when no pixel is jointly valid.
double abs_rel(const DepthMap& pred, const DepthMap& gt);
double abs_rel(const DepthSequence& pred, const DepthSequence& gt);

// Fraction of jointly valid pixels with max(pred/gt, gt/pred) < 1.25
// (strict). Throws DomainError on a non-positive depth.
double delta1(const DepthMap& pred, const DepthMap& gt);
double delta1(const DepthSequence& pred, const DepthSequence& gt);

// Boundary agreement. For threshold r, a 4-neighbour pixel pair is a
// boundary of a map iff max(d_p, d_q) / min(d_p, d_q) > r. Only pairs whose
// two pixels are valid in both maps are considered. Per threshold:
// recall = |P & G| / |G|, precision = |P & G| / |P| (0 if P is empty),
// F1 = harmonic mean (0 if both are 0). Thresholds where G is empty are
// skipped; if every threshold is skipped the scores are undefined.
struct BoundaryScores {
  bool defined = false;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  std::size_t thresholds_used = 0;
};

// Counts are pooled over frames before the ratios are formed.
BoundaryScores boundary_prf(const DepthMap& pred, const DepthMap& gt,
                            std::span<const double> thresholds = kDefaultBoundaryThresholds);
BoundaryScores boundary_prf(const DepthSequence& pred, const DepthSequence& gt,
                            std::span<const double> thresholds = kDefaultBoundaryThresholds);

struct MetricReport {
  double abs_rel = 0.0;
  double delta1 = 0.0;
  std::optional<double> b_recall;
  std::optional<double> b_precision;
  std::optional<double> b_f1;
  std::vector<AffineParams> alignment;
  std::size_t valid_pixel_count = 0;
  Granularity granularity = Granularity::kPerSequence;
  std::vector<double> boundary_thresholds;
};

struct FrameMetrics {
  std::size_t frame = 0;
  double abs_rel = 0.0;
  double delta1 = 0.0;
  BoundaryScores boundary;
  std::size_t valid_pixels = 0;
};

struct Evaluation {
  MetricReport report;
  std::vector<FrameMetrics> frames;
};

// Aligns, then computes every metric on the aligned prediction.
Evaluation evaluate(const DepthSequence& pred, const DepthSequence& gt,
                    Granularity granularity = Granularity::kPerSequence,
                    std::span<const double> thresholds = kDefaultBoundaryThresholds);

}  // namespace vdepth

#endif  // VDEPTH_DEPTH_METRICS_H_
