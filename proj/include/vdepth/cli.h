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

#ifndef VDEPTH_CLI_H_
#define VDEPTH_CLI_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vdepth/depth_metrics.h"
#include "vdepth/lmr_losses.h"
#include "vdepth/synth_bench.h"
#include "vdepth/timestep_anchor.h"

namespace vdepth::cli {

inline constexpr const char* kVersion = "0.1.0";

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,    // unexpected failure
  kExitUsage = 2,       // bad flags, config or manifest
  kExitIo = 3,          // file cannot be read or written
  kExitFormat = 4,      // malformed file or unencodable value
  kExitShape = 5,       // mismatched shapes / frame counts
  kExitDomain = 6,      // value outside an operation's domain
  kExitDegenerate = 7,  // alignment on a constant prediction
};

struct StitchJob {
  std::filesystem::path manifest;
  std::filesystem::path out;
};

struct EvalJob {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  Granularity granularity = Granularity::kPerSequence;
  std::optional<double> png16_scale;
  std::vector<double> thresholds{kDefaultBoundaryThresholds.begin(),
                                 kDefaultBoundaryThresholds.end()};
  std::optional<std::filesystem::path> out;  // report.json + per_frame.csv
};

struct BenchJob {
  SceneConfig scene{.frames = 1000, .height = 32, .width = 32};
  CorruptionConfig corruption{.sigma = 0.01};
  std::size_t window_size = 45;
  std::vector<std::size_t> overlaps{3, 6, 9, 14, 19};
  std::size_t seeds = 20;
  std::filesystem::path out;
};

struct EmbedJob {
  EmbeddingConfig embedding;
  double grid_stride = 0.1;
  std::vector<double> ts;  // overrides the grid when nonempty
  std::optional<std::filesystem::path> out;
};

struct LossJob {
  std::filesystem::path pred;
  std::filesystem::path target;
  LossWeights weights;
  std::optional<std::filesystem::path> image_pred;
  std::optional<std::filesystem::path> image_target;
  std::optional<std::filesystem::path> emit_grad;
  std::optional<std::filesystem::path> out;
};

using JobConfig = std::variant<StitchJob, EvalJob, BenchJob, EmbedJob, LossJob>;

std::string SubcommandName(const JobConfig& config);

struct ParseOutcome {
  std::optional<JobConfig> config;  // empty when parsing ended the process
  int exit_code = kExitOk;
};

// Parses argv (program name first). Help and parse errors are written to
// out / err and reported through exit_code.
ParseOutcome ParseArgs(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err);

// Validates paths, runs the job and writes its artifacts. Results that have
// no output path go to out; the run log goes to log. Artifacts of a failed
// job are removed.
int Run(const JobConfig& config, std::ostream& out, std::ostream& log);

int Main(int argc, const char* const* argv);

}  // namespace vdepth::cli

#endif  // VDEPTH_CLI_H_
