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

#include "embedlens/knn_index.h"

#include <algorithm>
#include <string>
#include <utility>

#include "embedlens/error.h"
#include "embedlens/numerics.h"

namespace embedlens {

FlatIndex::FlatIndex(const DataMatrix& x) : dim_(x.cols()), count_(x.rows()) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw DegenerateInputError("cannot index an empty matrix");
  }
  data_.assign(x.values().data(), x.values().data() + x.values().size());
}

NeighborTable FlatIndex::search(const DataMatrix& queries, std::size_t k,
                                bool include_self) const {
  if (queries.cols() != dim_) {
    throw ContractError("query dimension " + std::to_string(queries.cols()) +
                        " does not match index dimension " +
                        std::to_string(dim_));
  }
  if (!include_self && queries.rows() != count_) {
    throw ContractError(
        "include_self=false requires the queries to be the stored rows (" +
        std::to_string(queries.rows()) + " queries, " +
        std::to_string(count_) + " stored)");
  }
  const std::size_t max_k = include_self ? count_ : count_ - 1;
  if (k < 1 || k > max_k) {
    throw ContractError("k=" + std::to_string(k) + " out of range [1, " +
                        std::to_string(max_k) + "]");
  }

  NeighborTable table;
  table.queries = queries.rows();
  table.k = k;
  table.squared = true;
  table.indices.resize(table.queries * k);
  table.distances.resize(table.queries * k);

  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(count_);
  const auto closer = [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  };
  for (std::size_t q = 0; q < table.queries; ++q) {
    const auto query = queries.row(q);
    candidates.clear();
    for (std::size_t s = 0; s < count_; ++s) {
      if (!include_self && s == q) continue;
      candidates.emplace_back(squared_euclidean_distance(query, stored_row(s)),
                              s);
    }
    if (k < candidates.size()) {
      std::nth_element(candidates.begin(),
                       candidates.begin() + static_cast<std::ptrdiff_t>(k),
                       candidates.end(), closer);
    }
    std::sort(candidates.begin(),
              candidates.begin() + static_cast<std::ptrdiff_t>(k), closer);
    for (std::size_t j = 0; j < k; ++j) {
      table.distances[q * k + j] = candidates[j].first;
      table.indices[q * k + j] = candidates[j].second;
    }
  }
  return table;
}

std::vector<double> FlatIndex::reconstruct(std::size_t i) const {
  if (i >= count_) {
    throw ContractError("reconstruct: id " + std::to_string(i) +
                        " out of range for index of size " +
                        std::to_string(count_));
  }
  const auto row = stored_row(i);
  return {row.begin(), row.end()};
}

NeighborTable self_knn(const DataMatrix& x, std::size_t k, bool include_self) {
  return FlatIndex(x).search(x, k, include_self);
}

}  // namespace embedlens
