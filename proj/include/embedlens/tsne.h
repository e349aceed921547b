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

#ifndef EMBEDLENS_TSNE_H_
#define EMBEDLENS_TSNE_H_

#include <vector>

#include "embedlens/data_matrix.h"
#include "embedlens/transforms.h"

namespace embedlens {

struct TsneResult {
  DataMatrix embedding;
  // KL(P || Q) after every iteration, measured against the un-exaggerated P.
  // Empty when params.record_kl is false.
  std::vector<double> kl_trace;
  // 2^H_i for each point's calibrated conditional distribution.
  std::vector<double> realized_perplexity;
};

// Per-point Gaussian conditionals p_{j|i} (row-major n x n, zero diagonal)
// whose perplexity 2^H_i matches `perplexity` within 1e-5, by bisection on
// the precision. Throws ConvergenceError naming the point after 200 steps.
std::vector<double> calibrate_conditionals(const DataMatrix& x,
                                           double perplexity,
                                           std::vector<double>* realized);

// Exact O(n^2) t-SNE. Requires n >= 10 and perplexity < (n - 1) / 3.
TsneResult run_tsne(const DataMatrix& x, std::size_t d_out, std::uint64_t seed,
                    const TsneParams& params = {});

DataMatrix tsne_fit_transform(const DataMatrix& x, const TransformSpec& spec);

}  // namespace embedlens

#endif  // EMBEDLENS_TSNE_H_
