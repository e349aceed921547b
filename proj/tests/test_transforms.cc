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

#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "embedlens/datasets.h"
#include "embedlens/error.h"
#include "embedlens/rng.h"
#include "embedlens/transforms.h"
#include "oracles.h"

namespace embedlens {
namespace {

std::vector<double> column_variances(const DataMatrix& m) {
  std::vector<double> out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, c);
    mean /= static_cast<double>(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ss += (m(i, c) - mean) * (m(i, c) - mean);
    }
    out.push_back(ss / static_cast<double>(m.rows() - 1));
  }
  return out;
}

DataMatrix blobs(std::size_t n, std::size_t dim, double noise,
                 std::uint64_t seed) {
  DatasetSpec s;
  s.n_samples = n;
  s.dim = dim;
  s.noise = noise;
  s.seed = seed;
  return make_blobs(s).data;
}

TEST_CASE("pca of a rank-1 pair") {
  const DataMatrix x = DataMatrix::from_rows({{-1, -1}, {1, 1}});
  const DataMatrix z = pca_fit_transform(x, 1);
  CHECK(z(0, 0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(z(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("pca at full rank preserves pairwise distances") {
  Rng rng(10);
  const DataMatrix x = oracle::random_matrix(30, 4, rng);
  const DataMatrix z = pca_fit_transform(x, 4);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = i + 1; j < 30; ++j) {
      CHECK(oracle::rel_close(oracle::sq_dist(x, i, j), oracle::sq_dist(z, i, j),
                              1e-8));
    }
  }
}

TEST_CASE("pca component variances are non-increasing and bounded") {
  const DataMatrix x = blobs(200, 16, 1.0, 4);
  const DataMatrix z = pca_fit_transform(x, 6);
  const auto var = column_variances(z);
  for (std::size_t c = 1; c < var.size(); ++c) CHECK(var[c] <= var[c - 1] + 1e-9);
  const auto in = column_variances(x);
  const double total_in = std::accumulate(in.begin(), in.end(), 0.0);
  const double total_out = std::accumulate(var.begin(), var.end(), 0.0);
  CHECK(total_out <= total_in + 1e-9);
  const auto full = column_variances(pca_fit_transform(x, 16));
  CHECK(std::accumulate(full.begin(), full.end(), 0.0) ==
        doctest::Approx(total_in).epsilon(1e-10));
}

TEST_CASE("pca sign convention and row-permutation invariance") {
  Rng rng(12);
  const DataMatrix x = oracle::random_matrix(40, 5, rng);
  const DataMatrix z = pca_fit_transform(x, 3);
  RowMatrix reversed = x.values().colwise().reverse();
  const DataMatrix zr = pca_fit_transform(DataMatrix(reversed), 3);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(std::abs(z(i, c) - zr(39 - i, c)) < 1e-8);
    }
  }
}

TEST_CASE("pca argument checks and label carry-over") {
  const DataMatrix x =
      DataMatrix::from_rows({{0, 1}, {1, 0}, {2, 2}}).with_labels({0, 1, 0});
  CHECK_THROWS_AS(pca_fit_transform(x, 0), ContractError);
  CHECK_THROWS_AS(pca_fit_transform(x, 3), ContractError);
  const DataMatrix z = pca_fit_transform(x, 1);
  REQUIRE(z.has_labels());
  CHECK(z.labels()[1] == 1);
}

TEST_CASE("grp: linear, deterministic, seed-sensitive") {
  const DataMatrix zero(RowMatrix::Zero(5, 8));
  const DataMatrix z0 = grp_transform(zero, 3, 1);
  CHECK(z0.values().cwiseAbs().maxCoeff() == 0.0);
  Rng rng(2);
  const DataMatrix x = oracle::random_matrix(10, 8, rng);
  CHECK(grp_transform(x, 3, 5) == grp_transform(x, 3, 5));
  CHECK_FALSE(grp_transform(x, 3, 5) == grp_transform(x, 3, 6));
  CHECK_THROWS_AS(grp_transform(x, 0, 1), ContractError);
}

TEST_CASE("grp preserves squared distances in the JL sense") {
  Rng rng(100);
  const DataMatrix x = oracle::random_matrix(200, 512, rng);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataMatrix z = grp_transform(x, 128, seed);
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      for (std::size_t j = i + 1; j < 200; ++j) {
        const double orig = oracle::sq_dist(x, i, j);
        sum += std::abs(oracle::sq_dist(z, i, j) - orig) / orig;
        ++pairs;
      }
    }
    total += sum / static_cast<double>(pairs);
  }
  CHECK(total / 10.0 < 0.25);
}

TEST_CASE("grp squared distance is unbiased over seeds") {
  Rng rng(101);
  const DataMatrix x = oracle::random_matrix(6, 64, rng);
  for (std::size_t p = 0; p < 5; ++p) {
    const std::size_t i = p, j = p + 1;
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      mean += oracle::sq_dist(grp_transform(x, 128, seed), i, j) / 50.0;
    }
    CHECK(std::abs(mean / oracle::sq_dist(x, i, j) - 1.0) < 0.05);
  }
}

TEST_CASE("logistic probe on separated clusters") {
  const DataMatrix x = blobs(500, 2, 0.6, 21);
  CHECK(logistic_accuracy(pca_fit_transform(x, 2), 21) >= 0.98);
}

TEST_CASE("logistic probe with shuffled labels is near chance") {
  const DataMatrix x = blobs(500, 2, 0.6, 22);
  std::vector<int> labels(x.labels().begin(), x.labels().end());
  Rng rng(5);
  for (std::size_t i = labels.size() - 1; i > 0; --i) {
    std::swap(labels[i], labels[rng.below(i + 1)]);
  }
  const double acc = logistic_accuracy(x.with_labels(labels), 3);
  CHECK(acc >= 0.35);
  CHECK(acc <= 0.65);
}

TEST_CASE("logistic probe contract") {
  const DataMatrix x = blobs(20, 2, 0.6, 1);
  CHECK_THROWS_AS(logistic_accuracy(x.without_labels(), 0), ContractError);
  CHECK_THROWS_AS(logistic_accuracy(x.with_labels(std::vector<int>(20, 1)), 0),
                  ContractError);
  std::vector<int> three(20, 0);
  for (std::size_t i = 0; i < 20; ++i) three[i] = static_cast<int>(i % 3);
  CHECK_THROWS_AS(logistic_accuracy(x.with_labels(three), 0), ContractError);
  std::vector<int> tiny(20, 0);
  tiny[0] = tiny[1] = 1;
  CHECK_THROWS_AS(logistic_accuracy(x.with_labels(tiny), 0), ContractError);
  const double acc = logistic_accuracy(x, 0);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(logistic_accuracy(x, 4) == logistic_accuracy(x, 4));
}

TEST_CASE("transform kind names") {
  CHECK(parse_transform_kind("tsne") == TransformKind::kTsne);
  CHECK(to_string(TransformKind::kGrp) == "grp");
  CHECK_THROWS_AS(parse_transform_kind("umap"), ContractError);
}

}  // namespace
}  // namespace embedlens
