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

#include "vdepth/lmr_losses.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {
namespace {

void CheckSameShape(const LatentSequence& pred, const LatentSequence& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError(fmt::format("prediction {} and target {} differ in shape",
                                 pred.shape().ToString(), target.shape().ToString()));
  }
}

double Sign(double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

// Residuals of the spatial differentials, pred minus target.
SpatialDifferentials SpatialResidual(const Tensor4& pred, const Tensor4& target) {
  SpatialDifferentials p = spatial_differentials(pred);
  const SpatialDifferentials t = spatial_differentials(target);
  for (std::size_t k = 0; k < p.dh.size(); ++k) p.dh.values()[k] -= t.dh.values()[k];
  for (std::size_t k = 0; k < p.dw.size(); ++k) p.dw.values()[k] -= t.dw.values()[k];
  return p;
}

Tensor4 TemporalResidual(const Tensor4& pred, const Tensor4& target) {
  Tensor4 p = temporal_differentials(pred);
  const Tensor4 t = temporal_differentials(target);
  for (std::size_t k = 0; k < p.size(); ++k) p.values()[k] -= t.values()[k];
  return p;
}

double LossOf(LossKind kind, const LatentSequence& pred,
              const LatentSequence& target, const LossWeights& weights) {
  switch (kind) {
    case LossKind::kSpatial: return spatial_rectification_loss(pred, target).value;
    case LossKind::kTemporal: return temporal_rectification_loss(pred, target).value;
    case LossKind::kVideo: return video_objective(pred, target, weights).total;
  }
  return 0.0;
}

// Marks coordinates of pred that feed a residual closer than `margin` to 0.
std::vector<std::uint8_t> KinkMask(LossKind kind, const Tensor4& pred,
                                   const Tensor4& target, double margin) {
  const Shape4& s = pred.shape();
  std::vector<std::uint8_t> near(pred.size(), 0);
  if (kind == LossKind::kSpatial || kind == LossKind::kVideo) {
    const SpatialDifferentials r = SpatialResidual(pred, target);
    for (std::size_t f = 0; f < s.frames; ++f) {
      for (std::size_t c = 0; c < s.channels; ++c) {
        for (std::size_t i = 0; i + 1 < s.height; ++i) {
          for (std::size_t j = 0; j < s.width; ++j) {
            if (std::abs(r.dh(f, c, i, j)) < margin) {
              near[pred.index(f, c, i, j)] = 1;
              near[pred.index(f, c, i + 1, j)] = 1;
            }
          }
        }
        for (std::size_t i = 0; i < s.height; ++i) {
          for (std::size_t j = 0; j + 1 < s.width; ++j) {
            if (std::abs(r.dw(f, c, i, j)) < margin) {
              near[pred.index(f, c, i, j)] = 1;
              near[pred.index(f, c, i, j + 1)] = 1;
            }
          }
        }
      }
    }
  }
  if (kind == LossKind::kTemporal || kind == LossKind::kVideo) {
    const Tensor4 r = TemporalResidual(pred, target);
    const std::size_t frame_len = s.channels * s.height * s.width;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (std::abs(r.values()[k]) < margin) {
        near[k] = 1;
        near[k + frame_len] = 1;
      }
    }
  }
  return near;
}

}  // namespace

void LossWeights::Validate() const {
  for (double w : {lambda_sp, lambda_temp, lambda_image}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError(fmt::format("loss weight must be finite and >= 0, got {}", w));
    }
  }
}

LossValue mse_loss(const LatentSequence& pred, const LatentSequence& target) {
  CheckSameShape(pred, target);
  const auto p = pred.values();
  const auto t = target.values();
  const double n = static_cast<double>(p.size());
  LossValue out{0.0, Tensor4(pred.shape())};
  auto g = out.gradient.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double r = p[k] - t[k];
    out.value += r * r;
    g[k] = 2.0 * r / n;
  }
  out.value /= n;
  return out;
}

LossValue spatial_rectification_loss(const LatentSequence& pred,
                                     const LatentSequence& target) {
  CheckSameShape(pred, target);
  const Shape4& s = pred.shape();
  const double norm = static_cast<double>(s.frames) * static_cast<double>(s.height * s.width);
  const SpatialDifferentials r = SpatialResidual(pred, target);
  LossValue out{0.0, Tensor4(s)};
  Tensor4& g = out.gradient;
  for (std::size_t f = 0; f < s.frames; ++f) {
    for (std::size_t c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i + 1 < s.height; ++i) {
        for (std::size_t j = 0; j < s.width; ++j) {
          const double v = r.dh(f, c, i, j);
          out.value += std::abs(v);
          g(f, c, i + 1, j) += Sign(v) / norm;
          g(f, c, i, j) -= Sign(v) / norm;
        }
      }
      for (std::size_t i = 0; i < s.height; ++i) {
        for (std::size_t j = 0; j + 1 < s.width; ++j) {
          const double v = r.dw(f, c, i, j);
          out.value += std::abs(v);
          g(f, c, i, j + 1) += Sign(v) / norm;
          g(f, c, i, j) -= Sign(v) / norm;
        }
      }
    }
  }
  out.value /= norm;
  return out;
}

LossValue temporal_rectification_loss(const LatentSequence& pred,
                                      const LatentSequence& target) {
  CheckSameShape(pred, target);
  const Shape4& s = pred.shape();
  LossValue out{0.0, Tensor4(s)};
  if (s.frames < 2) return out;
  const double norm =
      static_cast<double>(s.frames - 1) * static_cast<double>(s.height * s.width);
  const Tensor4 r = TemporalResidual(pred, target);
  const std::size_t frame_len = s.channels * s.height * s.width;
  auto g = out.gradient.values();
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double v = r.values()[k];
    out.value += std::abs(v);
    g[k + frame_len] += Sign(v) / norm;
    g[k] -= Sign(v) / norm;
  }
  out.value /= norm;
  return out;
}

LossReport video_objective(const LatentSequence& pred,
                           const LatentSequence& target,
                           const LossWeights& weights) {
  weights.Validate();
  LossValue l2 = mse_loss(pred, target);
  const LossValue sp = spatial_rectification_loss(pred, target);
  const LossValue temp = temporal_rectification_loss(pred, target);
  LossReport report;
  report.l2 = l2.value;
  report.l_sp = sp.value;
  report.l_temp = temp.value;
  report.total = l2.value + weights.lambda_sp * sp.value + weights.lambda_temp * temp.value;
  report.gradient = std::move(l2.gradient);
  auto g = report.gradient.values();
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] += weights.lambda_sp * sp.gradient.values()[k] +
            weights.lambda_temp * temp.gradient.values()[k];
  }
  if (!std::isfinite(report.total)) throw DomainError("video objective is not finite");
  return report;
}

double joint_objective(const LossReport& video, const LossReport& image,
                       const LossWeights& weights) {
  weights.Validate();
  return video.total + weights.lambda_image * image.total;
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "sp") return LossKind::kSpatial;
  if (name == "temp") return LossKind::kTemporal;
  if (name == "video") return LossKind::kVideo;
  throw ConfigError(fmt::format("unknown loss kind '{}'", name));
}

GradientCheckResult finite_difference_check(LossKind kind,
                                            const LatentSequence& pred,
                                            const LatentSequence& target,
                                            double eps,
                                            const LossWeights& weights) {
  if (!(eps > 0.0)) throw DomainError("finite-difference step must be positive");
  CheckSameShape(pred, target);
  Tensor4 analytic;
  switch (kind) {
    case LossKind::kSpatial: analytic = spatial_rectification_loss(pred, target).gradient; break;
    case LossKind::kTemporal: analytic = temporal_rectification_loss(pred, target).gradient; break;
    case LossKind::kVideo: analytic = video_objective(pred, target, weights).gradient; break;
  }
  const std::vector<std::uint8_t> near_kink = KinkMask(kind, pred, target, 10.0 * eps);

  GradientCheckResult result;
  Tensor4 probe = pred.tensor();
  for (std::size_t k = 0; k < probe.size(); ++k) {
    if (near_kink[k]) {
      ++result.skipped;
      continue;
    }
    const double x = probe.values()[k];
    probe.values()[k] = x + eps;
    const double up = LossOf(kind, LatentSequence(probe), target, weights);
    probe.values()[k] = x - eps;
    const double down = LossOf(kind, LatentSequence(probe), target, weights);
    probe.values()[k] = x;
    const double numeric = (up - down) / (2.0 * eps);
    const double err =
        std::abs(analytic.values()[k] - numeric) / std::max(1.0, std::abs(numeric));
    result.max_relative_error = std::max(result.max_relative_error, err);
    ++result.checked;
  }
  return result;
}

}  // namespace vdepth
