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

#include "vdepth/timestep_anchor.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vdepth/error.h"

namespace vdepth {

void EmbeddingConfig::Validate() const {
  if (dim == 0 || dim % 2 != 0) {
    throw ConfigError(fmt::format("embedding dim must be even and positive, got {}", dim));
  }
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw ConfigError(fmt::format("embedding base must be > 1, got {}", base));
  }
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) {
    throw ConfigError(fmt::format("time scale must be > 0, got {}", time_scale));
  }
}

std::vector<double> angular_frequencies(const EmbeddingConfig& cfg) {
  cfg.Validate();
  const std::size_t half = cfg.dim / 2;
  std::vector<double> omega(half);
  for (std::size_t i = 0; i < half; ++i) {
    omega[i] = std::pow(cfg.base, -2.0 * static_cast<double>(i) /
                                      static_cast<double>(cfg.dim));
  }
  return omega;
}

AnchorEmbedding sinusoidal_embedding(double t, const EmbeddingConfig& cfg) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError(fmt::format("timestep {} outside [0, 1]", t));
  }
  const std::vector<double> omega = angular_frequencies(cfg);
  const std::size_t half = omega.size();
  AnchorEmbedding e{t, std::vector<double>(cfg.dim)};
  for (std::size_t i = 0; i < half; ++i) {
    const double phase = omega[i] * cfg.time_scale * t;
    e.vector[i] = std::cos(phase);
    e.vector[i + half] = std::sin(phase);
  }
  return e;
}

SimilarityMatrix embedding_similarity_matrix(std::span<const double> ts,
                                             const EmbeddingConfig& cfg) {
  if (ts.empty()) throw DomainError("similarity matrix needs at least one timestep");
  std::vector<std::vector<double>> emb;
  std::vector<double> norms;
  for (double t : ts) {
    emb.push_back(sinusoidal_embedding(t, cfg).vector);
    double sq = 0.0;
    for (double v : emb.back()) sq += v * v;
    if (!(sq > 0.0)) throw Error("internal: zero-norm timestep embedding");
    norms.push_back(std::sqrt(sq));
  }
  const std::size_t n = ts.size();
  SimilarityMatrix m{std::vector<double>(ts.begin(), ts.end()),
                     std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < cfg.dim; ++k) dot += emb[i][k] * emb[j][k];
      const double c = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      m.values[i * n + j] = c;
      m.values[j * n + i] = c;
    }
  }
  return m;
}

std::vector<double> timestep_grid(double stride) {
  if (!(stride > 0.0 && stride <= 1.0)) {
    throw ConfigError(fmt::format("timestep grid stride must be in (0, 1], got {}", stride));
  }
  std::vector<double> ts;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * stride;
    if (t > 1.0 + 0.5 * stride) break;
    ts.push_back(std::min(t, 1.0));
  }
  return ts;
}

}  // namespace vdepth
