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

#include "embedlens/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "embedlens/error.h"
#include "embedlens/knn_index.h"

namespace embedlens {

std::string_view to_string(IdpeMode mode) {
  return mode == IdpeMode::kBox1 ? "box1" : "consistent";
}

IdpeMode parse_idpe_mode(std::string_view text) {
  if (text == "box1") return IdpeMode::kBox1;
  if (text == "consistent") return IdpeMode::kConsistent;
  throw ContractError("unknown IDPE mode '" + std::string(text) +
                      "' (expected box1 or consistent)");
}

RankContext::RankContext(const DataMatrix& x) : n_(x.rows()) {
  if (n_ < 2) {
    throw DegenerateInputError("ranking needs at least 2 points, got " +
                               std::to_string(n_));
  }
  ordering_.resize(n_ * (n_ - 1));
  rank_.assign(n_ * n_, 0);
  std::vector<std::pair<double, std::uint32_t>> row;
  row.reserve(n_ - 1);
  for (std::size_t i = 0; i < n_; ++i) {
    row.clear();
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      row.emplace_back(squared_euclidean_distance(xi, x.row(j)),
                       static_cast<std::uint32_t>(j));
    }
    std::sort(row.begin(), row.end());
    for (std::size_t r = 0; r < row.size(); ++r) {
      ordering_[i * (n_ - 1) + r] = row[r].second;
      rank_[i * n_ + row[r].second] = static_cast<std::uint32_t>(r + 1);
    }
  }
}

EmbeddingEvaluator::EmbeddingEvaluator(DataMatrix original,
                                       DataMatrix embedding,
                                       InversionPolicy policy)
    : original_(std::move(original)),
      embedding_(std::move(embedding)),
      policy_(policy) {
  if (original_.rows() != embedding_.rows()) {
    throw ContractError("row count mismatch: original has " +
                        std::to_string(original_.rows()) +
                        " rows, embedding has " +
                        std::to_string(embedding_.rows()));
  }
}

const RankContext& EmbeddingEvaluator::original_ranks() {
  if (!original_ranks_) original_ranks_.emplace(original_);
  return *original_ranks_;
}

const RankContext& EmbeddingEvaluator::embedding_ranks() {
  if (!embedding_ranks_) embedding_ranks_.emplace(embedding_);
  return *embedding_ranks_;
}

const CovarianceModel& EmbeddingEvaluator::covariance_model() {
  if (!model_) model_ = fit_covariance_model(original_, policy_);
  return *model_;
}

void EmbeddingEvaluator::check_rank_k(std::size_t k,
                                      std::string_view metric) const {
  if (n() < 2) {
    throw DegenerateInputError(std::string(metric) +
                               " needs at least 2 points");
  }
  if (k < 1 || k > n() - 1) {
    throw ContractError(std::string(metric) + ": k=" + std::to_string(k) +
                        " out of range [1, " + std::to_string(n() - 1) + "]");
  }
}

void EmbeddingEvaluator::check_tc_k(std::size_t k,
                                    std::string_view metric) const {
  check_rank_k(k, metric);
  const auto n_signed = static_cast<long long>(n());
  const auto k_signed = static_cast<long long>(k);
  if (2 * n_signed - 3 * k_signed - 1 <= 0) {
    throw ContractError(std::string(metric) + ": normalizer 2N-3k-1 = " +
                        std::to_string(2 * n_signed - 3 * k_signed - 1) +
                        " is not positive (N=" + std::to_string(n()) +
                        ", k=" + std::to_string(k) +
                        "); k must be below (2N-1)/3");
  }
}

std::uint64_t EmbeddingEvaluator::true_neighbor_rank_sum(std::size_t k) {
  const RankContext& orig = original_ranks();
  const RankContext& emb = embedding_ranks();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n(); ++i) {
    const auto relevant = orig.ordering(i).first(k);
    for (std::uint32_t g : relevant) total += emb.rank(i, g);
  }
  return total;
}

MetricReport EmbeddingEvaluator::average_rank(std::size_t k) {
  check_rank_k(k, "ar");
  // |G(q)| = k for every query, so the mean of per-query means is the
  // grand total over n * k.
  const double total = static_cast<double>(true_neighbor_rank_sum(k));
  const double n_d = static_cast<double>(n());
  MetricReport r;
  r.metric = "ar";
  r.value = total / (n_d * static_cast<double>(k));
  r.k = k;
  r.n = n();
  return r;
}

MetricReport EmbeddingEvaluator::average_normalized_rank(std::size_t k) {
  check_rank_k(k, "anr");
  const double total = static_cast<double>(true_neighbor_rank_sum(k));
  const double n_d = static_cast<double>(n());
  MetricReport r;
  r.metric = "anr";
  r.value = total / (n_d * static_cast<double>(k)) / n_d;
  r.k = k;
  r.n = n();
  return r;
}

MetricReport EmbeddingEvaluator::mean_reciprocal_rank() {
  if (n() < 2) {
    throw DegenerateInputError("mrr needs at least 2 points, got " +
                               std::to_string(n()));
  }
  const RankContext& orig = original_ranks();
  const RankContext& emb = embedding_ranks();
  double sum = 0.0;
  for (std::size_t i = 0; i < n(); ++i) {
    sum += 1.0 / static_cast<double>(emb.rank(i, orig.ordering(i)[0]));
  }
  MetricReport r;
  r.metric = "mrr";
  r.value = sum / static_cast<double>(n());
  r.k = 1;
  r.n = n();
  return r;
}

double EmbeddingEvaluator::rank_excess(std::size_t k,
                                       const RankContext& neighbors_from,
                                       const RankContext& ranked_in) {
  // j is among i's k nearest in `ranked_in` exactly when its rank there is
  // at most k, so the set difference reduces to a rank comparison.
  std::uint64_t excess = 0;
  for (std::size_t i = 0; i < n(); ++i) {
    for (std::uint32_t j : neighbors_from.ordering(i).first(k)) {
      const std::size_t rank = ranked_in.rank(i, j);
      if (rank > k) excess += rank - k;
    }
  }
  const double n_d = static_cast<double>(n());
  const double k_d = static_cast<double>(k);
  const double norm = 2.0 / (n_d * k_d * (2.0 * n_d - 3.0 * k_d - 1.0));
  return 1.0 - norm * static_cast<double>(excess);
}

MetricReport EmbeddingEvaluator::trustworthiness(std::size_t k) {
  check_tc_k(k, "trustworthiness");
  MetricReport r;
  r.metric = "trustworthiness";
  r.value = rank_excess(k, embedding_ranks(), original_ranks());
  r.k = k;
  r.n = n();
  return r;
}

MetricReport EmbeddingEvaluator::continuity(std::size_t k) {
  check_tc_k(k, "continuity");
  MetricReport r;
  r.metric = "continuity";
  r.value = rank_excess(k, original_ranks(), embedding_ranks());
  r.k = k;
  r.n = n();
  return r;
}

MetricReport EmbeddingEvaluator::idpe(std::size_t k, IdpeMode mode,
                                      std::optional<bool> include_self) {
  const bool self = include_self.value_or(mode == IdpeMode::kBox1);
  const std::size_t max_k = self ? n() : n() - 1;
  if (n() < 2) throw DegenerateInputError("idpe needs at least 2 points");
  if (k < 1 || k > max_k) {
    throw ContractError("idpe: k=" + std::to_string(k) + " out of range [1, " +
                        std::to_string(max_k) + "]");
  }
  const CovarianceModel& model = covariance_model();

  const NeighborTable truth = self_knn(original_, k, self);
  const NeighborTable test = self_knn(embedding_, k, self);

  double value = 0.0;
  if (mode == IdpeMode::kBox1) {
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      const auto xi = original_.row(i);
      const auto true_d = truth.neighbor_distances(i);
      const auto test_ids = test.neighbors(i);
      for (std::size_t r = 0; r < k; ++r) {
        const double calc =
            mahalanobis_distance(xi, original_.row(test_ids[r]), model);
        const double diff = true_d[r] - calc;
        sum_sq += diff * diff;
      }
    }
    value = sum_sq / static_cast<double>(n() * k);
  } else {
    double sum_abs = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      const auto xi = original_.row(i);
      const auto true_ids = truth.neighbors(i);
      const auto test_ids = test.neighbors(i);
      for (std::size_t r = 0; r < k; ++r) {
        const double d_true =
            mahalanobis_distance(xi, original_.row(true_ids[r]), model);
        const double d_test =
            true_ids[r] == test_ids[r]
                ? d_true
                : mahalanobis_distance(xi, original_.row(test_ids[r]), model);
        sum_abs += std::abs(d_true - d_test);
      }
    }
    value = sum_abs / static_cast<double>(n());
  }

  MetricReport r;
  r.metric = "idpe";
  r.value = value;
  r.k = k;
  r.mode = std::string(to_string(mode));
  r.n = n();
  r.inversion_strategy = model.strategy_name();
  r.include_self = self;
  return r;
}

MetricReport average_rank(const DataMatrix& x, const DataMatrix& z,
                          std::size_t k) {
  return EmbeddingEvaluator(x, z).average_rank(k);
}

MetricReport average_normalized_rank(const DataMatrix& x, const DataMatrix& z,
                                     std::size_t k) {
  return EmbeddingEvaluator(x, z).average_normalized_rank(k);
}

MetricReport mean_reciprocal_rank(const DataMatrix& x, const DataMatrix& z) {
  return EmbeddingEvaluator(x, z).mean_reciprocal_rank();
}

MetricReport trustworthiness(const DataMatrix& x, const DataMatrix& z,
                             std::size_t k) {
  return EmbeddingEvaluator(x, z).trustworthiness(k);
}

MetricReport continuity(const DataMatrix& x, const DataMatrix& z,
                        std::size_t k) {
  return EmbeddingEvaluator(x, z).continuity(k);
}

MetricReport idpe(const DataMatrix& x, const DataMatrix& z, std::size_t k,
                  IdpeMode mode, std::optional<bool> include_self,
                  const InversionPolicy& policy) {
  return EmbeddingEvaluator(x, z, policy).idpe(k, mode, include_self);
}

}  // namespace embedlens
