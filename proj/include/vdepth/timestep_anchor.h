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

#ifndef VDEPTH_TIMESTEP_ANCHOR_H_
#define VDEPTH_TIMESTEP_ANCHOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace vdepth {

// Mid-range anchor timestep used to condition the depth regressor.
inline constexpr double kDefaultAnchorTimestep = 0.5;

// Sinusoidal embedding parameters. Angular frequencies follow the geometric
// schedule w_i = base^(-2i/dim), i = 0..dim/2-1, and t is multiplied by
// time_scale before embedding.
struct EmbeddingConfig {
  std::size_t dim = 256;
  double base = 10000.0;
  double time_scale = 1000.0;

  // Throws ConfigError unless dim is even and positive, base > 1 and
  // time_scale > 0.
  void Validate() const;
};

struct AnchorEmbedding {
  double t = 0.0;
  // [cos(w_0 S t) .. cos(w_{d/2-1} S t), sin(w_0 S t) .. sin(w_{d/2-1} S t)]
  std::vector<double> vector;
};

std::vector<double> angular_frequencies(const EmbeddingConfig& cfg);

// Throws DomainError if t is outside [0, 1].
AnchorEmbedding sinusoidal_embedding(double t, const EmbeddingConfig& cfg);

// Row-major square matrix of pairwise cosine similarities.
struct SimilarityMatrix {
  std::vector<double> ts;
  std::vector<double> values;

  std::size_t size() const { return ts.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return values[i * ts.size() + j];
  }
};

SimilarityMatrix embedding_similarity_matrix(std::span<const double> ts,
                                             const EmbeddingConfig& cfg);

// 0, stride, 2*stride, ... up to and including 1 (within half a stride).
std::vector<double> timestep_grid(double stride);

}  // namespace vdepth

#endif  // VDEPTH_TIMESTEP_ANCHOR_H_
