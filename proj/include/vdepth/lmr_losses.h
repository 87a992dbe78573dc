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

#ifndef VDEPTH_LMR_LOSSES_H_
#define VDEPTH_LMR_LOSSES_H_

#include <cstddef>
#include <string_view>

#include "vdepth/tensor.h"

namespace vdepth {

// Weights of the rectification terms and of the image branch in the joint
// objective. Defaults are the training configuration (0.5 / 0.5 / 1.0).
struct LossWeights {
  double lambda_sp = 0.5;
  double lambda_temp = 0.5;
  double lambda_image = 1.0;

  // Throws ConfigError on a negative or non-finite weight.
  void Validate() const;
};

struct LossValue {
  double value = 0.0;
  Tensor4 gradient;  // d(value)/d(pred), same shape as pred
};

struct LossReport {
  double total = 0.0;
  double l2 = 0.0;
  double l_sp = 0.0;
  double l_temp = 0.0;
  Tensor4 gradient;  // d(total)/d(pred)
};

// Mean squared error over all elements.
LossValue mse_loss(const LatentSequence& pred, const LatentSequence& target);

// Spatial rectification: L1 distance between the forward differences of
// pred and target along h and w, summed over frames and channels and divided
// by frames * (h * w). The L1 subgradient at a zero residual is 0.
LossValue spatial_rectification_loss(const LatentSequence& pred,
                                     const LatentSequence& target);

// Temporal rectification: L1 distance between frame-to-frame differences,
// divided by (frames - 1) * (h * w). A single frame gives 0.
LossValue temporal_rectification_loss(const LatentSequence& pred,
                                      const LatentSequence& target);

// total = mse + lambda_sp * l_sp + lambda_temp * l_temp.
LossReport video_objective(const LatentSequence& pred,
                           const LatentSequence& target,
                           const LossWeights& weights = {});

// video.total + lambda_image * image.total. The image report is expected to
// come from video_objective on a single-frame sequence.
double joint_objective(const LossReport& video, const LossReport& image,
                       const LossWeights& weights = {});

enum class LossKind { kSpatial, kTemporal, kVideo };

// Accepts "sp", "temp", "video". Throws ConfigError otherwise.
LossKind ParseLossKind(std::string_view name);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;  // coordinates compared
  std::size_t skipped = 0;  // coordinates next to an L1 kink
};

// Central-difference check of the analytic gradient. For each coordinate of
// pred, compares the analytic derivative with (L(x+eps) - L(x-eps)) / 2eps
// and records |analytic - numeric| / max(1, |numeric|). Coordinates that
// touch a differential residual with |r| < 10 * eps are skipped, since the
// perturbation could cross the L1 kink there.
GradientCheckResult finite_difference_check(LossKind kind,
                                            const LatentSequence& pred,
                                            const LatentSequence& target,
                                            double eps,
                                            const LossWeights& weights = {});

}  // namespace vdepth

#endif  // VDEPTH_LMR_LOSSES_H_
