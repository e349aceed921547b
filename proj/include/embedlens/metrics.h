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

#ifndef EMBEDLENS_METRICS_H_
#define EMBEDLENS_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedlens/data_matrix.h"
#include "embedlens/numerics.h"

namespace embedlens {

inline constexpr std::size_t kDefaultK = 5;

enum class IdpeMode {
  // Squared-L2 truth distances against original-space Mahalanobis distances
  // of embedding-neighbor pairs, aggregated by mean squared error. This is
  // the reference FAISS-based procedure, reproduced step for step.
  kBox1,
  // Both sides are original-space Mahalanobis distances (true neighbors vs.
  // embedding neighbors), aggregated as (1/n) sum_i sum_r |true - test|.
  kConsistent,
};

std::string_view to_string(IdpeMode mode);
// Accepts "box1" and "consistent"; throws ContractError otherwise.
IdpeMode parse_idpe_mode(std::string_view text);

struct MetricReport {
  std::string metric;
  double value = 0.0;
  std::size_t k = 0;
  // IDPE only.
  std::string mode;
  std::size_t n = 0;
  // IDPE only.
  std::string inversion_strategy;
  bool include_self = false;
};

// For every point, all other points ordered by ascending squared Euclidean
// distance, ties to the lower index. Ranks are 1-based.
class RankContext {
 public:
  explicit RankContext(const DataMatrix& x);

  std::size_t size() const { return n_; }
  // The n - 1 other ids of point i, nearest first.
  std::span<const std::uint32_t> ordering(std::size_t i) const {
    return {ordering_.data() + i * (n_ - 1), n_ - 1};
  }
  // Position of j in ordering(i), starting at 1. Undefined for i == j.
  std::size_t rank(std::size_t i, std::size_t j) const {
    return rank_[i * n_ + j];
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> ordering_;
  std::vector<std::uint32_t> rank_;
};

// Computes the metrics for one (original, embedding) pair, building the
// rank contexts and covariance model on first use and reusing them after.
// Not safe for concurrent use; give each thread its own evaluator.
class EmbeddingEvaluator {
 public:
  // Throws ContractError when the row counts differ.
  EmbeddingEvaluator(DataMatrix original, DataMatrix embedding,
                     InversionPolicy policy = {});

  std::size_t n() const { return original_.rows(); }

  MetricReport average_rank(std::size_t k = kDefaultK);
  MetricReport average_normalized_rank(std::size_t k = kDefaultK);
  MetricReport mean_reciprocal_rank();
  MetricReport trustworthiness(std::size_t k = kDefaultK);
  MetricReport continuity(std::size_t k = kDefaultK);
  MetricReport idpe(std::size_t k = kDefaultK, IdpeMode mode = IdpeMode::kBox1,
                    std::optional<bool> include_self = std::nullopt);

  const CovarianceModel& covariance_model();

 private:
  const RankContext& original_ranks();
  const RankContext& embedding_ranks();
  void check_rank_k(std::size_t k, std::string_view metric) const;
  void check_tc_k(std::size_t k, std::string_view metric) const;
  // Sum over all ranks of the original k-NN inside the embedding ordering.
  std::uint64_t true_neighbor_rank_sum(std::size_t k);
  double rank_excess(std::size_t k, const RankContext& neighbors_from,
                     const RankContext& ranked_in);

  DataMatrix original_;
  DataMatrix embedding_;
  InversionPolicy policy_;
  std::optional<RankContext> original_ranks_;
  std::optional<RankContext> embedding_ranks_;
  std::optional<CovarianceModel> model_;
};

MetricReport average_rank(const DataMatrix& x, const DataMatrix& z,
                          std::size_t k = kDefaultK);
MetricReport average_normalized_rank(const DataMatrix& x, const DataMatrix& z,
                                     std::size_t k = kDefaultK);
MetricReport mean_reciprocal_rank(const DataMatrix& x, const DataMatrix& z);
MetricReport trustworthiness(const DataMatrix& x, const DataMatrix& z,
                             std::size_t k = kDefaultK);
MetricReport continuity(const DataMatrix& x, const DataMatrix& z,
                        std::size_t k = kDefaultK);
// include_self defaults to true for kBox1 and false for kConsistent.
MetricReport idpe(const DataMatrix& x, const DataMatrix& z,
                  std::size_t k = kDefaultK, IdpeMode mode = IdpeMode::kBox1,
                  std::optional<bool> include_self = std::nullopt,
                  const InversionPolicy& policy = {});

}  // namespace embedlens

#endif  // EMBEDLENS_METRICS_H_
