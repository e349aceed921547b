// Copyright 2026 The EmbedLens Authors.
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

#ifndef EMBEDLENS_TRANSFORMS_H_
#define EMBEDLENS_TRANSFORMS_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "embedlens/data_matrix.h"

namespace embedlens {

enum class TransformKind { kPca, kGrp, kTsne };

std::string_view to_string(TransformKind kind);
// "pca", "grp", "tsne".
TransformKind parse_transform_kind(std::string_view text);

// Exact t-SNE hyperparameters. Defaults follow the standard schedule of the
// original t-SNE publication.
struct TsneParams {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  // Initial coordinates ~ N(0, init_variance).
  double init_variance = 1e-4;
  // Record KL(P || Q) every iteration (one log per pair, roughly doubling
  // the per-iteration cost).
  bool record_kl = true;
};

struct TransformSpec {
  TransformKind kind = TransformKind::kPca;
  std::size_t d_out = 2;
  std::uint64_t seed = 0;
  TsneParams tsne;
};

// Centered PCA by SVD of the centered matrix. Components follow descending
// singular value; each component is signed so that its largest-magnitude
// loading is positive. Throws ContractError unless 1 <= d_out <= min(n, d).
DataMatrix pca_fit_transform(const DataMatrix& x, std::size_t d_out);

// Z = X R with R[i][j] ~ N(0, 1 / d_out), drawn row-major from Rng(seed).
DataMatrix grp_transform(const DataMatrix& x, std::size_t d_out,
                         std::uint64_t seed);

// Dispatches on spec.kind. Labels of `x` carry over to the result.
DataMatrix apply_transform(const DataMatrix& x, const TransformSpec& spec);

struct LogisticParams {
  double test_fraction = 0.2;
  double l2_penalty = 1e-4;
  std::size_t iterations = 500;
  double step = 0.1;
};

// Binary logistic-regression probe: stratified train/test split from
// Rng(seed), features standardized with training statistics, full-batch
// gradient descent. Returns test accuracy. Throws ContractError unless the
// labels hold exactly two classes with at least 5 samples each.
double logistic_accuracy(const DataMatrix& z, std::uint64_t seed,
                         const LogisticParams& params = {});

}  // namespace embedlens

#endif  // EMBEDLENS_TRANSFORMS_H_
