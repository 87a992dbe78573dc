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

#include "vdepth/depth_metrics.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {
namespace {

void CheckShapes(const DepthMap& pred, const DepthMap& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError(fmt::format("prediction {}x{} and ground truth {}x{} differ",
                                 pred.height(), pred.width(), gt.height(), gt.width()));
  }
}

void CheckShapes(const DepthSequence& pred, const DepthSequence& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError(fmt::format("prediction ({} frames) and ground truth ({} frames) differ",
                                 pred.frame_count(), gt.frame_count()));
  }
}

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;

  double Mean(const char* what) const {
    if (count == 0) throw DomainError(fmt::format("{}: no jointly valid pixels", what));
    return sum / static_cast<double>(count);
  }
};

void AccumulateAbsRel(const DepthMap& pred, const DepthMap& gt, Accumulator& acc) {
  CheckShapes(pred, gt);
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (!pred.mask()[k] || !gt.mask()[k]) continue;
    const double g = gt.values()[k];
    if (!(g > 0.0)) throw DomainError("abs_rel: ground truth must be positive");
    acc.sum += std::abs(pred.values()[k] - g) / g;
    ++acc.count;
  }
}

void AccumulateDelta1(const DepthMap& pred, const DepthMap& gt, Accumulator& acc) {
  CheckShapes(pred, gt);
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (!pred.mask()[k] || !gt.mask()[k]) continue;
    const double p = pred.values()[k];
    const double g = gt.values()[k];
    if (!(p > 0.0) || !(g > 0.0)) throw DomainError("delta1: depths must be positive");
    if (std::max(p / g, g / p) < kDelta1Threshold) acc.sum += 1.0;
    ++acc.count;
  }
}

struct BoundaryCounts {
  std::size_t both = 0;
  std::size_t pred = 0;
  std::size_t gt = 0;
};

bool IsEdge(double a, double b, double threshold) {
  return std::max(a, b) / std::min(a, b) > threshold;
}

void AccumulateBoundary(const DepthMap& pred, const DepthMap& gt,
                        std::span<const double> thresholds,
                        std::vector<BoundaryCounts>& counts) {
  CheckShapes(pred, gt);
  const std::size_t h = pred.height(), w = pred.width();
  auto usable = [&](std::size_t r, std::size_t c) {
    if (!pred.valid(r, c) || !gt.valid(r, c)) return false;
    if (!(pred.at(r, c) > 0.0) || !(gt.at(r, c) > 0.0)) {
      throw DomainError("boundary metric: depths must be positive");
    }
    return true;
  };
  auto visit = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
    if (!usable(r0, c0) || !usable(r1, c1)) return;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      const bool p = IsEdge(pred.at(r0, c0), pred.at(r1, c1), thresholds[k]);
      const bool g = IsEdge(gt.at(r0, c0), gt.at(r1, c1), thresholds[k]);
      counts[k].pred += p;
      counts[k].gt += g;
      counts[k].both += p && g;
    }
  };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c + 1 < w) visit(r, c, r, c + 1);
      if (r + 1 < h) visit(r, c, r + 1, c);
    }
  }
}

void CheckThresholds(std::span<const double> thresholds) {
  if (thresholds.empty()) throw DomainError("boundary metric needs at least one threshold");
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > 1.0)) throw DomainError("boundary thresholds must be > 1");
    if (k > 0 && !(thresholds[k] > thresholds[k - 1])) {
      throw DomainError("boundary thresholds must be sorted ascending");
    }
  }
}

BoundaryScores Summarize(std::span<const BoundaryCounts> counts) {
  BoundaryScores s;
  for (const BoundaryCounts& c : counts) {
    if (c.gt == 0) continue;
    const double recall = static_cast<double>(c.both) / static_cast<double>(c.gt);
    const double precision =
        c.pred == 0 ? 0.0 : static_cast<double>(c.both) / static_cast<double>(c.pred);
    const double f1 =
        recall + precision > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    s.recall += recall;
    s.precision += precision;
    s.f1 += f1;
    ++s.thresholds_used;
  }
  if (s.thresholds_used == 0) return BoundaryScores{};
  const double n = static_cast<double>(s.thresholds_used);
  s.recall /= n;
  s.precision /= n;
  s.f1 /= n;
  s.defined = true;
  return s;
}

DepthMap JointMasked(const DepthMap& pred, const DepthMap& gt, AffineParams p) {
  DepthMap out = apply_affine(pred, p);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.mask()[k] = pred.mask()[k] && gt.mask()[k];
  }
  return out;
}

}  // namespace

Granularity ParseGranularity(std::string_view name) {
  if (name == "per_sequence") return Granularity::kPerSequence;
  if (name == "per_frame") return Granularity::kPerFrame;
  throw ConfigError(fmt::format("unknown granularity '{}'", name));
}

std::string_view GranularityName(Granularity g) {
  return g == Granularity::kPerSequence ? "per_sequence" : "per_frame";
}

Alignment align_for_eval(const DepthSequence& pred, const DepthSequence& gt,
                         Granularity granularity) {
  CheckShapes(pred, gt);
  auto gather = [&](std::size_t first, std::size_t last, std::vector<double>& a,
                    std::vector<double>& b, std::vector<std::uint8_t>& valid) {
    for (std::size_t f = first; f < last; ++f) {
      a.insert(a.end(), gt[f].values().begin(), gt[f].values().end());
      b.insert(b.end(), pred[f].values().begin(), pred[f].values().end());
      for (std::size_t k = 0; k < pred[f].size(); ++k) {
        valid.push_back(pred[f].mask()[k] && gt[f].mask()[k] ? 1 : 0);
      }
    }
  };

  std::vector<AffineParams> params;
  if (granularity == Granularity::kPerSequence) {
    std::vector<double> a, b;
    std::vector<std::uint8_t> valid;
    gather(0, pred.frame_count(), a, b, valid);
    params.push_back(fit_affine(a, b, valid));
  } else {
    for (std::size_t f = 0; f < pred.frame_count(); ++f) {
      std::vector<double> a, b;
      std::vector<std::uint8_t> valid;
      gather(f, f + 1, a, b, valid);
      params.push_back(fit_affine(a, b, valid));
    }
  }

  std::vector<DepthMap> frames;
  frames.reserve(pred.frame_count());
  for (std::size_t f = 0; f < pred.frame_count(); ++f) {
    frames.push_back(JointMasked(pred[f], gt[f], params[params.size() == 1 ? 0 : f]));
  }
  return {DepthSequence(std::move(frames)), std::move(params)};
}

double abs_rel(const DepthMap& pred, const DepthMap& gt) {
  Accumulator acc;
  AccumulateAbsRel(pred, gt, acc);
  return acc.Mean("abs_rel");
}

double abs_rel(const DepthSequence& pred, const DepthSequence& gt) {
  CheckShapes(pred, gt);
  Accumulator acc;
  for (std::size_t f = 0; f < pred.frame_count(); ++f) AccumulateAbsRel(pred[f], gt[f], acc);
  return acc.Mean("abs_rel");
}

double delta1(const DepthMap& pred, const DepthMap& gt) {
  Accumulator acc;
  AccumulateDelta1(pred, gt, acc);
  return acc.Mean("delta1");
}

double delta1(const DepthSequence& pred, const DepthSequence& gt) {
  CheckShapes(pred, gt);
  Accumulator acc;
  for (std::size_t f = 0; f < pred.frame_count(); ++f) AccumulateDelta1(pred[f], gt[f], acc);
  return acc.Mean("delta1");
}

BoundaryScores boundary_prf(const DepthMap& pred, const DepthMap& gt,
                            std::span<const double> thresholds) {
  CheckThresholds(thresholds);
  std::vector<BoundaryCounts> counts(thresholds.size());
  AccumulateBoundary(pred, gt, thresholds, counts);
  return Summarize(counts);
}

BoundaryScores boundary_prf(const DepthSequence& pred, const DepthSequence& gt,
                            std::span<const double> thresholds) {
  CheckShapes(pred, gt);
  CheckThresholds(thresholds);
  std::vector<BoundaryCounts> counts(thresholds.size());
  for (std::size_t f = 0; f < pred.frame_count(); ++f) {
    AccumulateBoundary(pred[f], gt[f], thresholds, counts);
  }
  return Summarize(counts);
}

Evaluation evaluate(const DepthSequence& pred, const DepthSequence& gt,
                    Granularity granularity, std::span<const double> thresholds) {
  Alignment al = align_for_eval(pred, gt, granularity);
  Evaluation ev;
  MetricReport& r = ev.report;
  r.granularity = granularity;
  r.boundary_thresholds.assign(thresholds.begin(), thresholds.end());
  r.abs_rel = abs_rel(al.aligned, gt);
  r.delta1 = delta1(al.aligned, gt);
  const BoundaryScores b = boundary_prf(al.aligned, gt, thresholds);
  if (b.defined) {
    r.b_recall = b.recall;
    r.b_precision = b.precision;
    r.b_f1 = b.f1;
  }
  for (const DepthMap& m : al.aligned.frames()) r.valid_pixel_count += m.valid_count();
  r.alignment = std::move(al.params);

  for (std::size_t f = 0; f < gt.frame_count(); ++f) {
    FrameMetrics fm;
    fm.frame = f;
    fm.valid_pixels = al.aligned[f].valid_count();
    if (fm.valid_pixels > 0) {
      fm.abs_rel = abs_rel(al.aligned[f], gt[f]);
      fm.delta1 = delta1(al.aligned[f], gt[f]);
      fm.boundary = boundary_prf(al.aligned[f], gt[f], thresholds);
    }
    ev.frames.push_back(fm);
  }
  return ev;
}

}  // namespace vdepth
