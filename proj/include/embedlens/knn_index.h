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

#ifndef EMBEDLENS_KNN_INDEX_H_
#define EMBEDLENS_KNN_INDEX_H_

#include <cstddef>
#include <span>
#include <vector>

#include "embedlens/data_matrix.h"

namespace embedlens {

// Per-query top-k neighbors in ascending distance order.
struct NeighborTable {
  std::size_t queries = 0;
  std::size_t k = 0;
  // Row-major queries x k.
  std::vector<std::size_t> indices;
  std::vector<double> distances;
  // True when `distances` hold squared Euclidean distances.
  bool squared = true;

  std::span<const std::size_t> neighbors(std::size_t q) const {
    return {indices.data() + q * k, k};
  }
  std::span<const double> neighbor_distances(std::size_t q) const {
    return {distances.data() + q * k, k};
  }
};

// Exhaustive exact L2 index. The stored matrix is copied at build time and
// never changes, so concurrent searches are safe.
class FlatIndex {
 public:
  // Throws DegenerateInputError on an empty matrix.
  explicit FlatIndex(const DataMatrix& x);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return count_; }

  // Exact top-k by squared Euclidean distance, ties to the lower stored id.
  // With include_self = false the queries must be the stored rows (same
  // count) and query row i never returns stored id i.
  NeighborTable search(const DataMatrix& queries, std::size_t k,
                       bool include_self = true) const;

  // Copy of stored row i; throws ContractError when i >= size().
  std::vector<double> reconstruct(std::size_t i) const;

  std::span<const double> stored_row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

// Convenience: index `x` and search it with its own rows.
NeighborTable self_knn(const DataMatrix& x, std::size_t k, bool include_self);

}  // namespace embedlens

#endif  // EMBEDLENS_KNN_INDEX_H_
