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

#include "vdepth/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "vdepth/affine_stitcher.h"
#include "vdepth/depth_io.h"
#include "vdepth/error.h"

namespace vdepth::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  invalid flags, config file or manifest\n"
    "  3  file cannot be read or written\n"
    "  4  malformed file or value the output format cannot hold\n"
    "  5  mismatched shapes or frame counts\n"
    "  6  value outside an operation's domain (e.g. non-positive depth)\n"
    "  7  degenerate alignment (constant prediction)\n";

// Output written under a sibling "<name>.partial" path and moved into place
// by Commit(). Uncommitted staging is deleted on destruction.
class StagedOutput {
 public:
  StagedOutput(fs::path final_path, bool directory)
      : final_(std::move(final_path)), directory_(directory) {
    staging_ = final_;
    staging_ += ".partial";
    std::error_code ec;
    fs::remove_all(staging_, ec);
    if (directory_ && !fs::create_directories(staging_, ec) && ec) {
      throw IoError(fmt::format("cannot create {}: {}", staging_.string(), ec.message()));
    }
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  const fs::path& path() const { return staging_; }

  void Commit() {
    std::error_code ec;
    if (directory_ && fs::exists(final_)) fs::remove(final_, ec);  // empty by validation
    fs::rename(staging_, final_, ec);
    if (ec) throw IoError(fmt::format("cannot move output into {}: {}", final_.string(), ec.message()));
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path staging_;
  bool directory_;
  bool committed_ = false;
};

void RequireFile(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw IoError(fmt::format("{} '{}' is not a readable file", what, p.string()));
}

void RequireDirectory(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw IoError(fmt::format("{} '{}' is not a directory", what, p.string()));
}

void RequireWritableFile(const fs::path& p) {
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw IoError(fmt::format("output directory '{}' does not exist", parent.string()));
  }
  if (fs::is_directory(p)) throw IoError(fmt::format("output '{}' is a directory", p.string()));
}

void RequireFreshDirectory(const fs::path& p) {
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw IoError(fmt::format("parent of output '{}' does not exist", p.string()));
  }
  if (fs::exists(p) && !(fs::is_directory(p) && fs::is_empty(p))) {
    throw ConfigError(fmt::format("output '{}' exists and is not an empty directory", p.string()));
  }
}

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  f << text;
  if (!f) throw IoError("error writing " + p.string());
}

std::string Num(double v) { return fmt::format("{:.17g}", v); }

json ParamsJson(const AffineParams& p) { return {{"scale", p.scale}, {"shift", p.shift}}; }

json ConfigJson(const JobConfig& config) {
  return std::visit(
      [](const auto& job) -> json {
        using T = std::decay_t<decltype(job)>;
        json j;
        if constexpr (std::is_same_v<T, StitchJob>) {
          j = {{"manifest", job.manifest.string()}, {"out", job.out.string()}};
        } else if constexpr (std::is_same_v<T, EvalJob>) {
          j = {{"pred", job.pred_dir.string()},
               {"gt", job.gt_dir.string()},
               {"granularity", GranularityName(job.granularity)},
               {"boundary_thresholds", job.thresholds},
               {"png16_scale", job.png16_scale ? json(*job.png16_scale) : json()},
               {"out", job.out ? json(job.out->string()) : json()}};
        } else if constexpr (std::is_same_v<T, BenchJob>) {
          const SceneConfig& s = job.scene;
          const CorruptionConfig& c = job.corruption;
          j = {{"frames", s.frames},       {"height", s.height},
               {"width", s.width},         {"seed", s.seed},
               {"motion", s.motion_amplitude}, {"near", s.near},
               {"far", s.far},             {"blobs", s.blob_count},
               {"scale_lo", c.scale_lo},   {"scale_hi", c.scale_hi},
               {"shift_lo", c.shift_lo},   {"shift_hi", c.shift_hi},
               {"sigma", c.sigma},         {"corruption_seed", c.seed},
               {"window", job.window_size}, {"overlaps", job.overlaps},
               {"seeds", job.seeds},       {"out", job.out.string()}};
        } else if constexpr (std::is_same_v<T, EmbedJob>) {
          j = {{"dim", job.embedding.dim},
               {"base", job.embedding.base},
               {"time_scale", job.embedding.time_scale},
               {"stride", job.grid_stride},
               {"t", job.ts},
               {"out", job.out ? json(job.out->string()) : json()}};
        } else {
          j = {{"pred", job.pred.string()},
               {"target", job.target.string()},
               {"lambda_sp", job.weights.lambda_sp},
               {"lambda_temp", job.weights.lambda_temp},
               {"lambda_image", job.weights.lambda_image},
               {"image_pred", job.image_pred ? json(job.image_pred->string()) : json()},
               {"image_target", job.image_target ? json(job.image_target->string()) : json()},
               {"emit_grad", job.emit_grad ? json(job.emit_grad->string()) : json()},
               {"out", job.out ? json(job.out->string()) : json()}};
        }
        return j;
      },
      config);
}

// ---------------------------------------------------------------- stitch

struct ManifestWindow {
  std::size_t start = 0;
  std::vector<fs::path> files;
  DepthFormat format = DepthFormat::kPfm;
  std::optional<double> png16_scale;
};

struct Manifest {
  std::size_t frame_count = 0;
  std::size_t window_size = 0;
  std::size_t stride = 0;
  std::vector<ManifestWindow> windows;
};

Manifest LoadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("manifest {}: {}", path.string(), e.what()));
  }
  const fs::path base = path.parent_path();
  Manifest m;
  try {
    m.frame_count = j.at("frame_count").get<std::size_t>();
    m.window_size = j.at("window_size").get<std::size_t>();
    const bool has_stride = j.contains("stride");
    const bool has_overlap = j.contains("overlap");
    if (has_stride && has_overlap) {
      throw ConfigError("manifest sets both stride and overlap; give one");
    }
    if (has_overlap) {
      const auto overlap = j.at("overlap").get<std::size_t>();
      if (overlap == 0 || overlap >= m.window_size) {
        throw ConfigError(fmt::format("overlap {} must be in [1, window_size)", overlap));
      }
      m.stride = m.window_size - overlap;
    } else {
      m.stride = has_stride ? j.at("stride").get<std::size_t>() : kDefaultStride;
    }
    for (const json& w : j.at("windows")) {
      ManifestWindow mw;
      mw.start = w.at("start").get<std::size_t>();
      mw.format = ParseDepthFormat(w.at("format").get<std::string>());
      if (w.contains("png16_scale")) mw.png16_scale = w.at("png16_scale").get<double>();
      for (const json& f : w.at("files")) {
        fs::path p = f.get<std::string>();
        mw.files.push_back(p.is_absolute() ? p : base / p);
      }
      m.windows.push_back(std::move(mw));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("manifest {}: {}", path.string(), e.what()));
  }
  if (m.windows.empty()) throw ConfigError("manifest lists no windows");
  return m;
}

int RunStitch(const StitchJob& job, std::ostream& /*out*/, std::ostream& log) {
  RequireFile(job.manifest, "manifest");
  RequireFreshDirectory(job.out);
  const Manifest m = LoadManifest(job.manifest);
  for (const ManifestWindow& w : m.windows) {
    for (const fs::path& p : w.files) RequireFile(p, "window frame");
  }
  const WindowPlan plan = plan_windows(m.frame_count, m.window_size, m.stride);

  std::vector<WindowPrediction> windows;
  for (const ManifestWindow& w : m.windows) {
    std::vector<DepthMap> frames;
    for (const fs::path& p : w.files) frames.push_back(read_depth_map(p, w.format, w.png16_scale));
    windows.push_back({w.start, DepthSequence(std::move(frames))});
  }
  const StitchResult result = stitch_sequence(windows, plan);

  const DepthFormat format = m.windows.front().format;
  const std::optional<double> scale = m.windows.front().png16_scale;
  StagedOutput staged(job.out, /*directory=*/true);
  for (std::size_t f = 0; f < result.depth.frame_count(); ++f) {
    write_depth_map(result.depth[f],
                    staged.path() / fmt::format("frame_{:06d}{}", f, FormatExtension(format)),
                    format, scale);
  }

  json fits = json::array();
  std::size_t fallbacks = 0;
  for (const WindowFit& fit : result.fits) {
    fits.push_back({{"window", fit.window},
                    {"start", fit.start},
                    {"overlap_frames", fit.overlap_frames},
                    {"valid_pixels", fit.valid_pixels},
                    {"scale", fit.params.scale},
                    {"shift", fit.params.shift},
                    {"fallback", fit.fallback},
                    {"note", fit.note}});
    log << fmt::format("window {} start {}: overlap {} frames, s = {}, t = {}{}\n", fit.window,
                       fit.start, fit.overlap_frames, Num(fit.params.scale),
                       Num(fit.params.shift), fit.fallback ? " (identity fallback)" : "");
    if (fit.fallback) {
      ++fallbacks;
      log << fmt::format("warning: window {} overlap is degenerate ({}); identity used\n",
                         fit.window, fit.note);
    }
  }
  const json stitch_log = {
      {"tool", "vdepth"},
      {"version", kVersion},
      {"subcommand", "stitch"},
      {"config", {{"manifest", job.manifest.string()}, {"out", job.out.string()}}},
      {"plan",
       {{"frame_count", plan.frame_count},
        {"window_size", plan.window_size},
        {"stride", plan.stride},
        {"overlap", plan.overlap()},
        {"starts", plan.starts}}},
      {"fit_count", result.fits.size()},
      {"fallback_count", fallbacks},
      {"fits", fits},
      {"output",
       {{"frames", result.depth.frame_count()},
        {"format", FormatName(format)},
        {"png16_scale", scale ? json(*scale) : json()}}}};
  WriteText(staged.path() / "stitch_log.json", stitch_log.dump(2) + "\n");
  staged.Commit();
  log << fmt::format("stitched {} windows into {} frames ({} fallbacks) -> {}\n",
                     windows.size(), result.depth.frame_count(), fallbacks, job.out.string());
  return kExitOk;
}

// ---------------------------------------------------------------- eval

std::vector<fs::path> ListDepthFiles(const fs::path& dir) {
  RequireDirectory(dir, "depth directory");
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && FormatFromPath(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (files.empty()) throw ConfigError(fmt::format("no depth files in '{}'", dir.string()));
  return files;
}

DepthSequence ReadDepthDirectory(const std::vector<fs::path>& files,
                                 std::optional<double> png16_scale) {
  std::vector<DepthMap> frames;
  for (const fs::path& p : files) frames.push_back(read_depth_map(p, *FormatFromPath(p), png16_scale));
  return DepthSequence(std::move(frames));
}

json OptionalJson(const std::optional<double>& v) { return v ? json(*v) : json(); }

int RunEval(const EvalJob& job, std::ostream& out, std::ostream& log) {
  const std::vector<fs::path> pred_files = ListDepthFiles(job.pred_dir);
  const std::vector<fs::path> gt_files = ListDepthFiles(job.gt_dir);
  if (job.out) RequireFreshDirectory(*job.out);
  if (pred_files.size() != gt_files.size()) {
    throw ShapeError(fmt::format("{} prediction frames but {} ground-truth frames",
                                 pred_files.size(), gt_files.size()));
  }
  const DepthSequence pred = ReadDepthDirectory(pred_files, job.png16_scale);
  const DepthSequence gt = ReadDepthDirectory(gt_files, job.png16_scale);
  const Evaluation ev = evaluate(pred, gt, job.granularity, job.thresholds);
  const MetricReport& r = ev.report;

  json params = json::array();
  for (const AffineParams& p : r.alignment) params.push_back(ParamsJson(p));
  const json report = {
      {"frames", gt.frame_count()},
      {"valid_pixel_count", r.valid_pixel_count},
      {"abs_rel", r.abs_rel},
      {"delta1", r.delta1},
      {"b_recall", OptionalJson(r.b_recall)},
      {"b_precision", OptionalJson(r.b_precision)},
      {"b_f1", OptionalJson(r.b_f1)},
      {"boundary_defined", r.b_f1.has_value()},
      {"alignment",
       {{"space", "depth"},
        {"method", "least-squares scale and shift"},
        {"granularity", GranularityName(r.granularity)},
        {"params", params}}},
      {"boundary",
       {{"definition",
         "4-neighbour pixel pairs with max/min depth ratio above threshold, "
         "pairs valid in both maps; recall, precision and F1 averaged over "
         "thresholds with at least one ground-truth boundary pair"},
        {"thresholds", r.boundary_thresholds}}},
      {"delta1_threshold", kDelta1Threshold}};

  std::string csv = "frame,file,abs_rel,delta1,b_recall,b_precision,b_f1,valid_pixels\n";
  for (const FrameMetrics& fm : ev.frames) {
    const auto opt = [&](double v) { return fm.boundary.defined ? Num(v) : std::string(); };
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", fm.frame,
                       pred_files[fm.frame].filename().string(), Num(fm.abs_rel),
                       Num(fm.delta1), opt(fm.boundary.recall), opt(fm.boundary.precision),
                       opt(fm.boundary.f1), fm.valid_pixels);
  }

  if (job.out) {
    StagedOutput staged(*job.out, /*directory=*/true);
    WriteText(staged.path() / "report.json", report.dump(2) + "\n");
    WriteText(staged.path() / "per_frame.csv", csv);
    staged.Commit();
  }
  out << report.dump(2) << "\n";
  log << fmt::format("evaluated {} frames ({} valid pixels): abs_rel {} delta1 {}\n",
                     gt.frame_count(), r.valid_pixel_count, Num(r.abs_rel), Num(r.delta1));
  return kExitOk;
}

// ---------------------------------------------------------------- bench

int RunBench(const BenchJob& job, std::ostream& out, std::ostream& log) {
  RequireWritableFile(job.out);
  job.scene.Validate();
  job.corruption.Validate();
  const AblationResult result = run_overlap_ablation(job.scene, job.corruption, job.window_size,
                                                     job.overlaps, job.seeds);
  std::string csv = "O,seed,abs_rel,delta1,wall_ms\n";
  for (const AblationRow& r : result.rows) {
    csv += fmt::format("{},{},{},{},{:.3f}\n", r.overlap, job.scene.seed + r.seed_index,
                       Num(r.abs_rel), Num(r.delta1), r.wall_ms);
  }
  StagedOutput staged(job.out, /*directory=*/false);
  WriteText(staged.path(), csv);
  staged.Commit();

  out << "O,mean_abs_rel,stderr_abs_rel,mean_delta1,mean_wall_ms,relative_runtime\n";
  for (const AblationSummary& s : result.summary) {
    out << fmt::format("{},{:.6g},{:.3g},{:.6g},{:.3f},{:.3f}\n", s.overlap, s.mean_abs_rel,
                       s.stderr_abs_rel, s.mean_delta1, s.mean_wall_ms, s.relative_runtime);
  }
  log << fmt::format("wrote {} rows to {}\n", result.rows.size(), job.out.string());
  return kExitOk;
}

// ---------------------------------------------------------------- embed

int RunEmbed(const EmbedJob& job, std::ostream& out, std::ostream& log) {
  if (job.out) RequireWritableFile(*job.out);
  const std::vector<double> ts = job.ts.empty() ? timestep_grid(job.grid_stride) : job.ts;
  const SimilarityMatrix m = embedding_similarity_matrix(ts, job.embedding);
  std::string csv = "t";
  for (double t : ts) csv += fmt::format(",{:.9g}", t);
  csv += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    csv += fmt::format("{:.9g}", ts[i]);
    for (std::size_t j = 0; j < m.size(); ++j) csv += fmt::format(",{:.9g}", m(i, j));
    csv += "\n";
  }
  if (job.out) {
    StagedOutput staged(*job.out, /*directory=*/false);
    WriteText(staged.path(), csv);
    staged.Commit();
    log << fmt::format("wrote {}x{} similarity matrix to {}\n", m.size(), m.size(),
                       job.out->string());
  } else {
    out << csv;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- loss

json LossJson(const LossReport& r) {
  return {{"total", r.total}, {"l2", r.l2}, {"l_sp", r.l_sp}, {"l_temp", r.l_temp}};
}

int RunLoss(const LossJob& job, std::ostream& out, std::ostream& log) {
  RequireFile(job.pred, "prediction tensor");
  RequireFile(job.target, "target tensor");
  if (job.image_pred.has_value() != job.image_target.has_value()) {
    throw ConfigError("--image-pred and --image-target must be given together");
  }
  if (job.image_pred) {
    RequireFile(*job.image_pred, "image prediction tensor");
    RequireFile(*job.image_target, "image target tensor");
  }
  if (job.emit_grad) RequireWritableFile(*job.emit_grad);
  if (job.out) RequireWritableFile(*job.out);
  job.weights.Validate();

  const LatentSequence pred(read_tensor4(job.pred));
  const LatentSequence target(read_tensor4(job.target));
  const LossReport video = video_objective(pred, target, job.weights);
  json report = {{"shape", {pred.shape().frames, pred.shape().channels, pred.shape().height,
                            pred.shape().width}},
                 {"weights",
                  {{"lambda_sp", job.weights.lambda_sp},
                   {"lambda_temp", job.weights.lambda_temp},
                   {"lambda_image", job.weights.lambda_image}}},
                 {"l2_convention", "mean squared error over all elements"},
                 {"video", LossJson(video)}};
  if (job.image_pred) {
    const LatentSequence ip(read_tensor4(*job.image_pred));
    const LatentSequence it(read_tensor4(*job.image_target));
    if (ip.shape().frames != 1) {
      throw ShapeError(fmt::format("image tensors must have one frame, got {}", ip.shape().frames));
    }
    const LossReport image = video_objective(ip, it, job.weights);
    report["image"] = LossJson(image);
    report["joint"] = joint_objective(video, image, job.weights);
  }

  std::optional<StagedOutput> grad_staged;
  if (job.emit_grad) {
    grad_staged.emplace(*job.emit_grad, /*directory=*/false);
    write_tensor4(grad_staged->path(), video.gradient);
  }
  std::optional<StagedOutput> json_staged;
  if (job.out) {
    json_staged.emplace(*job.out, /*directory=*/false);
    WriteText(json_staged->path(), report.dump(2) + "\n");
  }
  if (grad_staged) grad_staged->Commit();
  if (json_staged) json_staged->Commit();
  if (!job.out) out << report.dump(2) << "\n";
  log << fmt::format("video objective {} (l2 {}, l_sp {}, l_temp {})\n", Num(video.total),
                     Num(video.l2), Num(video.l_sp), Num(video.l_temp));
  return kExitOk;
}

// Splices "key = value" lines from a bench-synthetic --config file into the
// argument list as "--key value", dropping keys the command line already sets.
std::vector<std::string> ExpandBenchConfig(std::vector<std::string> args) {
  const auto sub = std::find(args.begin(), args.end(), "bench-synthetic");
  if (sub == args.end()) return args;
  std::optional<std::string> path;
  std::set<std::string> given;
  for (auto it = sub + 1; it != args.end(); ++it) {
    if (it->rfind("--", 0) != 0) continue;
    const std::size_t eq = it->find('=');
    const std::string key = it->substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        path = it->substr(eq + 1);
      } else if (it + 1 != args.end()) {
        path = *(it + 1);
      }
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot read config file " + *path);
  std::vector<std::string> injected;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", *path, lineno));
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty() || key == "config") {
      throw ConfigError(fmt::format("{}:{}: bad entry '{}'", *path, lineno, line));
    }
    if (given.count(key)) continue;
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  args.insert(std::find(args.begin(), args.end(), "bench-synthetic") + 1, injected.begin(),
              injected.end());
  return args;
}

}  // namespace

std::string SubcommandName(const JobConfig& config) {
  static constexpr const char* kNames[] = {"stitch", "eval", "bench-synthetic",
                                           "embed-analyze", "lmr-loss"};
  return kNames[config.index()];
}

ParseOutcome ParseArgs(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Long-video depth toolkit: affine window stitching, affine-invariant "
               "evaluation, latent rectification losses, timestep embeddings and a "
               "synthetic stitching benchmark.", "vdepth"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  StitchJob stitch;
  CLI::App* stitch_cmd = app.add_subcommand("stitch", "Stitch overlapping window predictions");
  stitch_cmd->add_option("--manifest", stitch.manifest, "Window manifest (JSON)")->required();
  stitch_cmd->add_option("--out", stitch.out, "Output directory (must be new or empty)")->required();

  EvalJob eval;
  std::string granularity = "per_sequence";
  CLI::App* eval_cmd = app.add_subcommand("eval", "Affine-invariant depth metrics");
  eval_cmd->add_option("--pred", eval.pred_dir, "Directory of predicted frames")->required();
  eval_cmd->add_option("--gt", eval.gt_dir, "Directory of ground-truth frames")->required();
  eval_cmd->add_option("--granularity", granularity, "per_sequence or per_frame")
      ->capture_default_str();
  eval_cmd->add_option("--png16-scale", eval.png16_scale, "Depth per png16 unit");
  eval_cmd->add_option("--thresholds", eval.thresholds, "Boundary depth-ratio thresholds")
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Directory for report.json and per_frame.csv");

  BenchJob bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench-synthetic", "Overlap-size ablation on synthetic scenes");
  std::string bench_config;
  bench_cmd->add_option("--config", bench_config,
                        "Flat 'key = value' file; flags on the command line take precedence");
  bench_cmd->add_option("--out", bench.out, "Results CSV")->required();
  bench_cmd->add_option("--frames", bench.scene.frames)->capture_default_str();
  bench_cmd->add_option("--height", bench.scene.height)->capture_default_str();
  bench_cmd->add_option("--width", bench.scene.width)->capture_default_str();
  bench_cmd->add_option("--seed", bench.scene.seed, "Base scene seed")->capture_default_str();
  bench_cmd->add_option("--motion", bench.scene.motion_amplitude, "Blob motion radius (px)")
      ->capture_default_str();
  bench_cmd->add_option("--near", bench.scene.near)->capture_default_str();
  bench_cmd->add_option("--far", bench.scene.far)->capture_default_str();
  bench_cmd->add_option("--blobs", bench.scene.blob_count)->capture_default_str();
  bench_cmd->add_option("--scale-lo", bench.corruption.scale_lo)->capture_default_str();
  bench_cmd->add_option("--scale-hi", bench.corruption.scale_hi)->capture_default_str();
  bench_cmd->add_option("--shift-lo", bench.corruption.shift_lo)->capture_default_str();
  bench_cmd->add_option("--shift-hi", bench.corruption.shift_hi)->capture_default_str();
  bench_cmd->add_option("--sigma", bench.corruption.sigma, "Pixel noise std")
      ->capture_default_str();
  bench_cmd->add_option("--corruption-seed", bench.corruption.seed)->capture_default_str();
  bench_cmd->add_option("--window", bench.window_size)->capture_default_str();
  bench_cmd->add_option("--overlaps", bench.overlaps)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--seeds", bench.seeds, "Number of seeds")->capture_default_str();

  EmbedJob embed;
  CLI::App* embed_cmd =
      app.add_subcommand("embed-analyze", "Cosine similarity of timestep embeddings (CSV)");
  embed_cmd->add_option("--dim", embed.embedding.dim)->capture_default_str();
  embed_cmd->add_option("--base", embed.embedding.base)->capture_default_str();
  embed_cmd->add_option("--time-scale", embed.embedding.time_scale)->capture_default_str();
  embed_cmd->add_option("--stride", embed.grid_stride, "Grid step over [0, 1]")
      ->capture_default_str();
  embed_cmd->add_option("--t", embed.ts, "Explicit timesteps (replaces the grid)")
      ->delimiter(',');
  embed_cmd->add_option("--out", embed.out, "CSV path (stdout if omitted)");

  LossJob loss;
  CLI::App* loss_cmd = app.add_subcommand("lmr-loss", "Rectified video objective on raw tensors");
  loss_cmd->add_option("--pred", loss.pred, "Predicted latents (raw)")->required();
  loss_cmd->add_option("--target", loss.target, "Target latents (raw)")->required();
  loss_cmd->add_option("--lambda-sp", loss.weights.lambda_sp)->capture_default_str();
  loss_cmd->add_option("--lambda-temp", loss.weights.lambda_temp)->capture_default_str();
  loss_cmd->add_option("--lambda-image", loss.weights.lambda_image)->capture_default_str();
  loss_cmd->add_option("--image-pred", loss.image_pred, "Single-frame image latents (raw)");
  loss_cmd->add_option("--image-target", loss.image_target, "Single-frame image targets (raw)");
  loss_cmd->add_option("--emit-grad", loss.emit_grad, "Write d(total)/d(pred) as raw tensor");
  loss_cmd->add_option("--out", loss.out, "JSON report path (stdout if omitted)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = ExpandBenchConfig(std::move(args));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return {std::nullopt, kExitUsage};
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
  }

  try {
    if (stitch_cmd->parsed()) return {JobConfig{stitch}, kExitOk};
    if (eval_cmd->parsed()) {
      eval.granularity = ParseGranularity(granularity);
      return {JobConfig{eval}, kExitOk};
    }
    if (bench_cmd->parsed()) return {JobConfig{bench}, kExitOk};
    if (embed_cmd->parsed()) return {JobConfig{embed}, kExitOk};
    return {JobConfig{loss}, kExitOk};
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return {std::nullopt, kExitUsage};
  }
}

int Run(const JobConfig& config, std::ostream& out, std::ostream& log) {
  try {
    log << fmt::format("vdepth {} {}\n", kVersion, SubcommandName(config));
    log << "config: " << ConfigJson(config).dump() << "\n";
    return std::visit(
        [&](const auto& job) {
          using T = std::decay_t<decltype(job)>;
          if constexpr (std::is_same_v<T, StitchJob>) return RunStitch(job, out, log);
          if constexpr (std::is_same_v<T, EvalJob>) return RunEval(job, out, log);
          if constexpr (std::is_same_v<T, BenchJob>) return RunBench(job, out, log);
          if constexpr (std::is_same_v<T, EmbedJob>) return RunEmbed(job, out, log);
          if constexpr (std::is_same_v<T, LossJob>) return RunLoss(job, out, log);
        },
        config);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    log << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const ShapeError& e) {
    log << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const DegenerateOverlap& e) {
    log << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int Main(int argc, const char* const* argv) {
  ParseOutcome parsed = ParseArgs(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return Run(*parsed.config, std::cout, std::cerr);
}

}  // namespace vdepth::cli
