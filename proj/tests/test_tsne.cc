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
#include <string>
#include <vector>

#include "doctest.h"
#include "embedlens/datasets.h"
#include "embedlens/error.h"
#include "embedlens/knn_index.h"
#include "embedlens/tsne.h"

namespace embedlens {
namespace {

DataMatrix blobs(std::size_t n, double noise, std::uint64_t seed) {
  DatasetSpec s;
  s.n_samples = n;
  s.noise = noise;
  s.seed = seed;
  return make_blobs(s).data;
}

TEST_CASE("calibration hits the target perplexity for every point") {
  const DataMatrix x = blobs(200, 1.0, 1);
  for (double perplexity : {5.0, 30.0}) {
    std::vector<double> realized;
    const auto cond = calibrate_conditionals(x, perplexity, &realized);
    for (std::size_t i = 0; i < 200; ++i) {
      CHECK(std::abs(realized[i] - perplexity) <= 1e-5);
      double sum = 0.0;
      for (std::size_t j = 0; j < 200; ++j) sum += cond[i * 200 + j];
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cond[i * 200 + i] == 0.0);
    }
  }
}

TEST_CASE("calibration fails loudly on indistinguishable points") {
  const DataMatrix x(RowMatrix::Ones(12, 2));
  try {
    calibrate_conditionals(x, 3.0, nullptr);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("point 0") != std::string::npos);
  }
}

TEST_CASE("t-SNE separates two blobs and its loss settles") {
  const DataMatrix x = blobs(200, 0.6, 2);
  const TsneResult r = run_tsne(x, 2, 7);
  REQUIRE(r.kl_trace.size() == 1000);
  for (double v : r.kl_trace) CHECK(std::isfinite(v));
  CHECK(r.kl_trace.back() < r.kl_trace[300]);

  std::vector<double> moving;
  for (std::size_t end = 900; end <= 1000; ++end) {
    double s = 0.0;
    for (std::size_t t = end - 10; t < end; ++t) s += r.kl_trace[t];
    moving.push_back(s / 10.0);
  }
  for (std::size_t t = 1; t < moving.size(); ++t) {
    CHECK(moving[t] <= moving[t - 1]);
  }

  const NeighborTable nn = self_knn(r.embedding, 5, false);
  std::size_t same = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j : nn.neighbors(i)) {
      same += x.labels()[i] == x.labels()[j];
    }
  }
  CHECK(static_cast<double>(same) / 1000.0 > 0.95);
  REQUIRE(r.embedding.has_labels());
}

TEST_CASE("t-SNE is deterministic per seed") {
  const DataMatrix x = blobs(60, 1.0, 3);
  TsneParams p;
  p.perplexity = 10.0;
  p.iterations = 300;
  CHECK(run_tsne(x, 2, 1, p).embedding == run_tsne(x, 2, 1, p).embedding);
  CHECK_FALSE(run_tsne(x, 2, 1, p).embedding == run_tsne(x, 2, 2, p).embedding);
  TransformSpec spec;
  spec.kind = TransformKind::kTsne;
  spec.seed = 1;
  spec.tsne = p;
  CHECK(tsne_fit_transform(x, spec) == run_tsne(x, 2, 1, p).embedding);
}

TEST_CASE("t-SNE preconditions") {
  CHECK_THROWS_AS(run_tsne(blobs(9, 1.0, 0), 2, 0), DegenerateInputError);
  TsneParams p;
  p.perplexity = 30.0;
  // (n - 1) / 3 = 30 for n = 91, and the bound is strict.
  CHECK_THROWS_AS(run_tsne(blobs(91, 1.0, 0), 2, 0, p), ContractError);
}

}  // namespace
}  // namespace embedlens
