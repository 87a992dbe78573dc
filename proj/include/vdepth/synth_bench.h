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

#ifndef VDEPTH_SYNTH_BENCH_H_
#define VDEPTH_SYNTH_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vdepth/affine_stitcher.h"
#include "vdepth/tensor.h"

namespace vdepth {

// Smooth synthetic depth video: a tilted ground ramp plus blob_count
// Gaussian blobs circling their seed positions with radius motion_amplitude
// (pixels). Depth is squashed into (near, far).
struct SceneConfig {
  std::uint64_t seed = 0;
  std::size_t frames = 100;
  std::size_t height = 64;
  std::size_t width = 64;
  double motion_amplitude = 4.0;
  double near = 1.0;
  double far = 10.0;
  std::size_t blob_count = 6;

  void Validate() const;
};

// Per-window affine drift plus i.i.d. Gaussian pixel noise:
//   window_k = s_k * gt[start_k ..] + t_k + N(0, sigma^2),
// with s_k ~ U[scale_lo, scale_hi], t_k ~ U[shift_lo, shift_hi].
struct CorruptionConfig {
  double scale_lo = 0.5;
  double scale_hi = 2.0;
  double shift_lo = -1.0;
  double shift_hi = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

DepthSequence generate_scene(const SceneConfig& cfg);

struct CorruptedWindows {
  std::vector<WindowPrediction> windows;
  std::vector<AffineParams> applied;  // (s_k, t_k) actually drawn
};

CorruptedWindows corrupt_windows(const DepthSequence& gt, const WindowPlan& plan,
                                 const CorruptionConfig& cfg);

// Minimises sum (s * pred + t - gt)^2 over jointly valid pixels by
// coarse-to-fine grid refinement, evaluating the residual directly on the
// data in extended precision. Shares no code with fit_affine.
AffineParams grid_search_alignment(const DepthSequence& pred, const DepthSequence& gt);

// Whole-sequence closed-form (s, t) mapping pred onto gt, cross-checked
// against grid_search_alignment (relative 1e-6). Throws DegenerateOverlap
// on constant pred and Error if the two routes disagree.
AffineParams global_alignment_oracle(const DepthSequence& pred, const DepthSequence& gt);

// aligned - gt at jointly valid pixels of every frame that some pair of
// consecutive windows shares.
std::vector<double> overlap_residuals(const DepthSequence& aligned,
                                      const DepthSequence& gt,
                                      const WindowPlan& plan);

struct AblationRow {
  std::size_t overlap = 0;
  std::size_t seed_index = 0;
  double abs_rel = 0.0;
  double delta1 = 0.0;
  double wall_ms = 0.0;  // corrupt + stitch
};

struct AblationSummary {
  std::size_t overlap = 0;
  double mean_abs_rel = 0.0;
  double stderr_abs_rel = 0.0;
  double mean_delta1 = 0.0;
  double mean_wall_ms = 0.0;
  double relative_runtime = 0.0;  // vs the smallest overlap
};

struct AblationResult {
  std::vector<AblationRow> rows;          // grouped by overlap, then seed
  std::vector<AblationSummary> summary;   // sorted by overlap
};

// For each overlap O: plan with stride = window_size - O, corrupt, stitch,
// align to ground truth with the oracle and score. Seed index i uses scene
// seed scene.seed + i and corruption seed corruption.seed + i.
AblationResult run_overlap_ablation(const SceneConfig& scene,
                                    const CorruptionConfig& corruption,
                                    std::size_t window_size,
                                    std::span<const std::size_t> overlaps,
                                    std::size_t seeds);

}  // namespace vdepth

#endif  // VDEPTH_SYNTH_BENCH_H_
