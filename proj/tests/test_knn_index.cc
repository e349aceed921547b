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

#include <algorithm>
#include <chrono>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "embedlens/error.h"
#include "embedlens/knn_index.h"
#include "embedlens/rng.h"
#include "oracles.h"

namespace embedlens {
namespace {

TEST_CASE("build_index echoes shape and reconstructs rows exactly") {
  const DataMatrix x = DataMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const FlatIndex index(x);
  CHECK(index.dim() == 2);
  CHECK(index.size() == 3);
  CHECK(index.reconstruct(0) == std::vector<double>{1, 2});
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = index.reconstruct(i);
    CHECK(std::equal(row.begin(), row.end(), x.row(i).begin()));
  }
  CHECK_THROWS_AS(index.reconstruct(3), ContractError);
}

TEST_CASE("index snapshots the input") {
  DataMatrix x = DataMatrix::from_rows({{0.0}, {1.0}});
  const FlatIndex index(x);
  x = DataMatrix::from_rows({{9.0}, {9.0}});
  CHECK(index.reconstruct(1)[0] == 1.0);
}

TEST_CASE("empty matrix cannot be indexed") {
  CHECK_THROWS_AS(FlatIndex{DataMatrix{}}, DegenerateInputError);
}

TEST_CASE("1-D worked search") {
  const std::vector<double> v{0, 1, 3, 6};
  const DataMatrix x = DataMatrix::column(v);
  const NeighborTable t = self_knn(x, 2, true);
  CHECK(t.squared);
  CHECK(t.neighbors(0)[0] == 0);
  CHECK(t.neighbors(0)[1] == 1);
  CHECK(t.neighbor_distances(0)[0] == 0.0);
  CHECK(t.neighbor_distances(0)[1] == 1.0);

  const NeighborTable noself = self_knn(x, 1, false);
  CHECK(noself.neighbors(3)[0] == 2);
  CHECK(noself.neighbor_distances(3)[0] == 9.0);
}

TEST_CASE("single query self match and tie to lower index") {
  const DataMatrix stored = DataMatrix::from_rows({{-1, 0}, {1, 0}, {5, 5}});
  const FlatIndex index(stored);
  const NeighborTable self = index.search(DataMatrix::from_rows({{5, 5}}), 1);
  CHECK(self.neighbors(0)[0] == 2);
  CHECK(self.neighbor_distances(0)[0] == 0.0);
  const NeighborTable tie = index.search(DataMatrix::from_rows({{0, 0}}), 1);
  CHECK(tie.neighbors(0)[0] == 0);
}

TEST_CASE("search argument checks") {
  const DataMatrix x = DataMatrix::from_rows({{0}, {1}, {2}});
  const FlatIndex index(x);
  CHECK_THROWS_AS(index.search(x, 0), ContractError);
  CHECK_THROWS_AS(index.search(x, 4), ContractError);
  CHECK_NOTHROW(index.search(x, 3, true));
  CHECK_THROWS_AS(index.search(x, 3, false), ContractError);
  CHECK_THROWS_AS(index.search(DataMatrix::from_rows({{0, 0}}), 1),
                  ContractError);
  CHECK_THROWS_AS(index.search(DataMatrix::from_rows({{0}}), 1, false),
                  ContractError);
}

TEST_CASE("search agrees exactly with the full-sort oracle") {
  Rng rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const std::size_t d = 1 + rng.below(8);
    // Rounded coordinates force plenty of exact distance ties.
    RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = trial % 2 ? std::round(3 * rng.normal()) : rng.normal();
      }
    }
    const DataMatrix x(m);
    const FlatIndex index(x);
    for (bool include_self : {true, false}) {
      const std::size_t max_k = include_self ? n : n - 1;
      for (std::size_t k : {std::size_t{1}, std::size_t{3}, max_k}) {
        if (k > max_k) continue;
        const NeighborTable t = index.search(x, k, include_self);
        const oracle::Knn expected = oracle::knn(x, x, k, include_self);
        for (std::size_t q = 0; q < n; ++q) {
          const auto ids = t.neighbors(q);
          const auto ds = t.neighbor_distances(q);
          CHECK(std::equal(ids.begin(), ids.end(), expected.ids[q].begin()));
          CHECK(std::equal(ds.begin(), ds.end(), expected.dists[q].begin()));
        }
      }
    }
  }
}

TEST_CASE("table invariants: sorted rows, distinct ids, full ranking") {
  Rng rng(77);
  const DataMatrix x = oracle::random_matrix(60, 4, rng);
  const NeighborTable full = self_knn(x, 60, true);
  for (std::size_t q = 0; q < 60; ++q) {
    const auto ids = full.neighbors(q);
    const auto ds = full.neighbor_distances(q);
    CHECK(std::is_sorted(ds.begin(), ds.end()));
    CHECK(ids[0] == q);
    CHECK(ds[0] == 0.0);
    std::vector<std::size_t> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> all(60);
    std::iota(all.begin(), all.end(), 0);
    CHECK(sorted == all);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const double direct = oracle::sq_dist(x, q, ids[j]);
      CHECK(oracle::rel_close(ds[j], direct, 1e-10));
    }
  }
}

TEST_CASE("1000x512 all-row search at k=5 completes quickly") {
  Rng rng(5);
  const DataMatrix x = oracle::random_matrix(1000, 512, rng);
  const auto start = std::chrono::steady_clock::now();
  const NeighborTable t = self_knn(x, 5, true);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  CHECK(t.queries == 1000);
  CHECK(seconds < 5.0);
}

}  // namespace
}  // namespace embedlens
