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

#include <bit>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"
#include "vdepth/error.h"

namespace vdepth {
namespace {

using testing::RandomDepthMap;
using testing::Rng;

// Every frame is covered and consecutive windows share at least one frame.
void ExpectCoverage(const WindowPlan& plan) {
  const std::size_t len = plan.window_length();
  std::vector<int> hits(plan.frame_count, 0);
  for (std::size_t s : plan.starts) {
    ASSERT_LE(s + len, plan.frame_count);
    for (std::size_t f = s; f < s + len; ++f) ++hits[f];
  }
  for (std::size_t f = 0; f < plan.frame_count; ++f) EXPECT_GE(hits[f], 1) << "frame " << f;
  for (std::size_t k = 1; k < plan.starts.size(); ++k) {
    EXPECT_GT(plan.starts[k], plan.starts[k - 1]);
    EXPECT_LT(plan.starts[k], plan.starts[k - 1] + len);
  }
}

TEST(PlanWindowsTest, SingleWindow) {
  const WindowPlan p = plan_windows(45, 45, 9);
  EXPECT_EQ(p.starts, std::vector<std::size_t>{0});
  const WindowPlan short_seq = plan_windows(20, 45, 9);
  EXPECT_EQ(short_seq.starts, std::vector<std::size_t>{0});
  EXPECT_EQ(short_seq.window_length(), 20u);
}

TEST(PlanWindowsTest, FinalStartIsClamped) {
  const WindowPlan p = plan_windows(63, 45, 36);
  EXPECT_EQ(p.starts, (std::vector<std::size_t>{0, 18}));
  EXPECT_EQ(p.starts[0] + 45 - p.starts[1], 27u);
  ExpectCoverage(p);
}

TEST(PlanWindowsTest, HundredFrames) {
  const WindowPlan p = plan_windows(100, 45, 9);
  EXPECT_EQ(p.starts, (std::vector<std::size_t>{0, 9, 18, 27, 36, 45, 54, 55}));
  EXPECT_EQ(p.overlap(), 36u);
  ExpectCoverage(p);
}

TEST(PlanWindowsTest, CoverageOnManyShapes) {
  for (std::size_t f = 1; f < 130; f += 7) {
    for (std::size_t w : {1u, 2u, 5u, 45u}) {
      for (std::size_t s = 1; s < w; s += 2) {
        const WindowPlan p = plan_windows(f, w, s);
        ExpectCoverage(p);
        if (f >= w) {
          EXPECT_EQ(p.starts.back(), f - w);
        }
      }
    }
  }
}

TEST(PlanWindowsTest, Errors) {
  EXPECT_THROW(plan_windows(100, 45, 45), ConfigError);
  EXPECT_THROW(plan_windows(100, 45, 0), ConfigError);
  EXPECT_THROW(plan_windows(0, 45, 9), ConfigError);
  EXPECT_THROW(plan_windows_with_overlap(100, 45, 0), ConfigError);
  EXPECT_THROW(plan_windows_with_overlap(100, 45, 45), ConfigError);
  EXPECT_EQ(plan_windows_with_overlap(100, 45, 9).stride, 36u);
}

// Coarse-to-fine 2-D grid minimum of the least-squares residual.
AffineParams GridFit(const std::vector<double>& a, const std::vector<double>& b) {
  double s_lo = -10, s_hi = 10, t_lo = -10, t_hi = 10;
  double best_s = 0, best_t = 0;
  for (int level = 0; level < 40; ++level) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double s = s_lo + (s_hi - s_lo) * i / 20.0;
        const double t = t_lo + (t_hi - t_lo) * j / 20.0;
        double r = 0;
        for (std::size_t k = 0; k < a.size(); ++k) r += (s * b[k] + t - a[k]) * (s * b[k] + t - a[k]);
        if (r < best) best = r, best_s = s, best_t = t;
      }
    }
    const double ds = (s_hi - s_lo) / 10.0, dt = (t_hi - t_lo) / 10.0;
    s_lo = best_s - ds, s_hi = best_s + ds, t_lo = best_t - dt, t_hi = best_t + dt;
  }
  return {best_s, best_t};
}

TEST(FitAffineTest, Identity) {
  const std::vector<double> a = {1.0, 4.0, 2.5, 7.0};
  const AffineParams p = fit_affine(a, a);
  EXPECT_DOUBLE_EQ(p.scale, 1.0);
  EXPECT_NEAR(p.shift, 0.0, 1e-15);
}

TEST(FitAffineTest, ExactRelation) {
  const std::vector<double> a = {1, 2, 3}, b = {2, 4, 6};
  const AffineParams p = fit_affine(a, b);
  EXPECT_DOUBLE_EQ(p.scale, 0.5);
  EXPECT_NEAR(p.shift, 0.0, 1e-15);
}

TEST(FitAffineTest, NoisyExampleMatchesGridOracle) {
  const std::vector<double> a = {1.0, 2.0, 4.0}, b = {1.1, 2.2, 3.9};
  const AffineParams p = fit_affine(a, b);
  EXPECT_NEAR(p.scale, 1.080402, 1e-6);
  EXPECT_NEAR(p.shift, -0.259631, 1e-6);
  const AffineParams g = GridFit(a, b);
  EXPECT_NEAR(p.scale, g.scale, 1e-9);
  EXPECT_NEAR(p.shift, g.shift, 1e-9);
}

TEST(FitAffineTest, MaskedPixelsAreIgnored) {
  const std::vector<double> a = {1, 2, 3, 1000}, b = {2, 4, 6, -5};
  const std::vector<std::uint8_t> valid = {1, 1, 1, 0};
  const AffineParams p = fit_affine(a, b, valid);
  EXPECT_DOUBLE_EQ(p.scale, 0.5);
}

TEST(FitAffineTest, Degenerate) {
  const std::vector<double> a = {1, 2, 3}, flat = {5, 5, 5};
  EXPECT_THROW(fit_affine(a, flat), DegenerateOverlap);
  const std::vector<std::uint8_t> one = {1, 0, 0};
  EXPECT_THROW(fit_affine(a, a, one), DegenerateOverlap);
  const std::vector<double> tiny = {1.0, 1.0 + 1e-14, 1.0};
  EXPECT_THROW(fit_affine(a, tiny), DegenerateOverlap);
  const std::vector<double> two = {1, 2};
  EXPECT_THROW(fit_affine(a, two), ShapeError);
}

TEST(FitAffineTest, PerturbationIncreasesResidual) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(200), b(200);
    for (std::size_t k = 0; k < a.size(); ++k) {
      b[k] = rng.Uniform(1, 10);
      a[k] = 1.3 * b[k] - 0.4 + rng.Normal(0.1);
    }
    const AffineParams p = fit_affine(a, b);
    const double base = affine_residual_sum(a, b, p);
    for (double d : {-1e-3, 1e-3}) {
      EXPECT_GT(affine_residual_sum(a, b, {p.scale + d, p.shift}), base);
      EXPECT_GT(affine_residual_sum(a, b, {p.scale, p.shift + d}), base);
    }
  }
}

TEST(ApplyAffineTest, Examples) {
  Rng rng(4);
  const DepthMap m = RandomDepthMap(3, 4, rng, 1, 5, 0.3);
  EXPECT_EQ(apply_affine(m, AffineParams{}), m);
  const DepthMap c = apply_affine(DepthMap(2, 2, 3.0), AffineParams{2.0, 1.0});
  for (double v : c.values()) EXPECT_EQ(v, 7.0);
  const AffineParams p1{1.5, -0.25}, p2{0.75, 2.0};
  const DepthMap twice = apply_affine(apply_affine(m, p1), p2);
  const DepthMap once = apply_affine(m, {p2.scale * p1.scale, p2.scale * p1.shift + p2.shift});
  EXPECT_TRUE(std::equal(twice.mask().begin(), twice.mask().end(), m.mask().begin()));
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m.mask()[k]) {
      EXPECT_NEAR(twice.values()[k], once.values()[k], 1e-14);
    }
  }
  EXPECT_THROW(apply_affine(m, {std::nan(""), 0.0}), DomainError);
}

std::vector<DepthMap> Constant(std::size_t n, double v) {
  return std::vector<DepthMap>(n, DepthMap(2, 2, v));
}

TEST(BlendOverlapTest, Examples) {
  Rng rng(5);
  std::vector<DepthMap> prev;
  for (int k = 0; k < 3; ++k) prev.push_back(RandomDepthMap(3, 3, rng, 1, 9));
  EXPECT_EQ(blend_overlap(prev, prev), prev);

  const auto mid = blend_overlap(Constant(1, 0.0), Constant(1, 2.0));
  for (double v : mid[0].values()) EXPECT_EQ(v, 1.0);

  const auto ramp = blend_overlap(Constant(3, 0.0), Constant(3, 4.0));
  for (int i = 0; i < 3; ++i) {
    for (double v : ramp[i].values()) EXPECT_DOUBLE_EQ(v, i + 1.0);
  }
}

TEST(BlendOverlapTest, SingleSourceFallback) {
  std::vector<DepthMap> prev = {DepthMap(1, 3, {1, 1, 1}, {1, 0, 0})};
  std::vector<DepthMap> cur = {DepthMap(1, 3, {3, 3, 3}, {0, 1, 0})};
  const auto out = blend_overlap(prev, cur);
  EXPECT_EQ(out[0].at(0, 0), 1.0);
  EXPECT_EQ(out[0].at(0, 1), 3.0);
  EXPECT_FALSE(out[0].valid(0, 2));
}

TEST(BlendOverlapTest, Errors) {
  EXPECT_THROW(blend_overlap(Constant(2, 0), Constant(3, 0)), ShapeError);
  EXPECT_THROW(blend_overlap(Constant(0, 0), Constant(0, 0)), ShapeError);
  std::vector<DepthMap> other = {DepthMap(3, 1, 0.0)};
  EXPECT_THROW(blend_overlap(Constant(1, 0), other), ShapeError);
}

DepthSequence RandomSequence(std::size_t frames, Rng& rng) {
  std::vector<DepthMap> f;
  for (std::size_t k = 0; k < frames; ++k) f.push_back(RandomDepthMap(4, 5, rng, 1, 10));
  return DepthSequence(std::move(f));
}

DepthSequence Slice(const DepthSequence& s, std::size_t start, std::size_t n) {
  return DepthSequence(std::vector<DepthMap>(s.frames().begin() + start,
                                             s.frames().begin() + start + n));
}

TEST(StitchSequenceTest, SingleWindowPassesThrough) {
  Rng rng(6);
  const DepthSequence w = RandomSequence(10, rng);
  const WindowPlan plan = plan_windows(10, 10, 3);
  const std::vector<WindowPrediction> windows = {{0, w}};
  const StitchResult r = stitch_sequence(windows, plan);
  EXPECT_EQ(r.depth, w);
  EXPECT_TRUE(r.fits.empty());
}

TEST(StitchSequenceTest, TwoWindowsRecoverGroundTruth) {
  Rng rng(7);
  const DepthSequence gt = RandomSequence(12, rng);
  const WindowPlan plan = plan_windows(12, 8, 4);
  ASSERT_EQ(plan.starts, (std::vector<std::size_t>{0, 4}));
  const double s = 1.7, t = -0.6;
  const AffineParams inverse{1.0 / s, -t / s};
  const std::vector<WindowPrediction> windows = {
      {0, Slice(gt, 0, 8)}, {4, apply_affine(Slice(gt, 4, 8), inverse)}};
  const StitchResult r = stitch_sequence(windows, plan);
  ASSERT_EQ(r.depth.frame_count(), 12u);
  ASSERT_EQ(r.fits.size(), 1u);
  EXPECT_NEAR(r.fits[0].params.scale, s, 1e-12);
  EXPECT_NEAR(r.fits[0].params.shift, t, 1e-12);
  EXPECT_EQ(r.fits[0].overlap_frames, 4u);
  for (std::size_t f = 0; f < 12; ++f) {
    for (std::size_t k = 0; k < gt[f].size(); ++k) {
      EXPECT_NEAR(r.depth[f].values()[k], gt[f].values()[k], 1e-12);
    }
  }
}

TEST(StitchSequenceTest, ThreeWindowChainIsOneGlobalAffineFromTruth) {
  Rng rng(8);
  const DepthSequence gt = RandomSequence(20, rng);
  const WindowPlan plan = plan_windows(20, 10, 5);
  ASSERT_EQ(plan.starts.size(), 3u);
  std::vector<WindowPrediction> windows;
  std::vector<AffineParams> applied;
  for (std::size_t s : plan.starts) {
    applied.push_back({rng.Uniform(0.5, 2.0), rng.Uniform(-1.0, 1.0)});
    windows.push_back({s, apply_affine(Slice(gt, s, 10), applied.back())});
  }
  const StitchResult r = stitch_sequence(windows, plan);
  // The chain lands in window 0's frame: stitched = s0 * gt + t0.
  const DepthSequence expect = apply_affine(gt, applied[0]);
  for (std::size_t f = 0; f < 20; ++f) {
    for (std::size_t k = 0; k < gt[f].size(); ++k) {
      EXPECT_NEAR(r.depth[f].values()[k], expect[f].values()[k], 1e-11);
    }
  }
}

TEST(StitchSequenceTest, GlobalAffineCommutesWithStitching) {
  Rng rng(9);
  const DepthSequence gt = RandomSequence(30, rng);
  const WindowPlan plan = plan_windows(30, 12, 7);
  std::vector<WindowPrediction> windows, moved;
  const AffineParams g{3.5, -2.0};
  for (std::size_t s : plan.starts) {
    const DepthSequence w =
        apply_affine(Slice(gt, s, 12), {rng.Uniform(0.5, 2.0), rng.Uniform(-1.0, 1.0)});
    windows.push_back({s, w});
    moved.push_back({s, apply_affine(w, g)});
  }
  const DepthSequence a = apply_affine(stitch_sequence(windows, plan).depth, g);
  const DepthSequence b = stitch_sequence(moved, plan).depth;
  for (std::size_t f = 0; f < 30; ++f) {
    for (std::size_t k = 0; k < a[f].size(); ++k) {
      EXPECT_NEAR(a[f].values()[k], b[f].values()[k], 1e-10);
    }
  }
}

TEST(StitchSequenceTest, DeterministicOutput) {
  Rng rng(10);
  const DepthSequence gt = RandomSequence(25, rng);
  const WindowPlan plan = plan_windows(25, 10, 6);
  std::vector<WindowPrediction> windows;
  for (std::size_t s : plan.starts) windows.push_back({s, Slice(gt, s, 10)});
  const DepthSequence a = stitch_sequence(windows, plan).depth;
  const DepthSequence b = stitch_sequence(windows, plan).depth;
  for (std::size_t f = 0; f < 25; ++f) {
    for (std::size_t k = 0; k < a[f].size(); ++k) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a[f].values()[k]),
                std::bit_cast<std::uint64_t>(b[f].values()[k]));
    }
  }
}

TEST(StitchSequenceTest, DegenerateOverlapFallsBackToIdentity) {
  const WindowPlan plan = plan_windows(6, 4, 2);
  std::vector<DepthMap> flat(4, DepthMap(2, 2, 5.0));
  const std::vector<WindowPrediction> windows = {{0, DepthSequence(flat)},
                                                 {2, DepthSequence(flat)}};
  const StitchResult r = stitch_sequence(windows, plan);
  ASSERT_EQ(r.fits.size(), 1u);
  EXPECT_TRUE(r.fits[0].fallback);
  EXPECT_FALSE(r.fits[0].note.empty());
  EXPECT_EQ(r.fits[0].params, AffineParams{});
  EXPECT_EQ(r.depth.frame_count(), 6u);
}

TEST(StitchSequenceTest, RejectsMismatchedWindows) {
  Rng rng(11);
  const DepthSequence gt = RandomSequence(12, rng);
  const WindowPlan plan = plan_windows(12, 8, 4);
  const std::vector<WindowPrediction> missing = {{0, Slice(gt, 0, 8)}};
  EXPECT_THROW(stitch_sequence(missing, plan), ConfigError);
  const std::vector<WindowPrediction> wrong_start = {{0, Slice(gt, 0, 8)}, {3, Slice(gt, 3, 8)}};
  EXPECT_THROW(stitch_sequence(wrong_start, plan), ConfigError);
  const std::vector<WindowPrediction> short_window = {{0, Slice(gt, 0, 8)}, {4, Slice(gt, 4, 7)}};
  EXPECT_THROW(stitch_sequence(short_window, plan), ShapeError);
}

}  // namespace
}  // namespace vdepth
