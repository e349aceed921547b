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

#include "embedlens/transforms.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "embedlens/error.h"
#include "embedlens/rng.h"
#include "embedlens/tsne.h"

namespace embedlens {
namespace {

DataMatrix carry_labels(const DataMatrix& from, RowMatrix values) {
  if (from.has_labels()) {
    return DataMatrix(std::move(values), std::vector<int>(from.labels().begin(),
                                                          from.labels().end()));
  }
  return DataMatrix(std::move(values));
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kPca:
      return "pca";
    case TransformKind::kGrp:
      return "grp";
    case TransformKind::kTsne:
      return "tsne";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view text) {
  if (text == "pca") return TransformKind::kPca;
  if (text == "grp") return TransformKind::kGrp;
  if (text == "tsne") return TransformKind::kTsne;
  throw ContractError("unknown transform '" + std::string(text) +
                      "' (expected pca, grp or tsne)");
}

DataMatrix pca_fit_transform(const DataMatrix& x, std::size_t d_out) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) {
    throw DegenerateInputError("pca needs at least 2 rows, got " +
                               std::to_string(n));
  }
  if (d_out < 1 || d_out > std::min(n, d)) {
    throw ContractError("pca: d_out=" + std::to_string(d_out) +
                        " out of range [1, " + std::to_string(std::min(n, d)) +
                        "]");
  }
  const Eigen::RowVectorXd mean = x.values().colwise().mean();
  const Eigen::MatrixXd centered = x.values().rowwise() - mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto k = static_cast<Eigen::Index>(d_out);
  Eigen::MatrixXd components = svd.matrixV().leftCols(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    components.col(c).cwiseAbs().maxCoeff(&arg);
    if (components(arg, c) < 0.0) components.col(c) *= -1.0;
  }
  RowMatrix projected = centered * components;
  return carry_labels(x, std::move(projected));
}

DataMatrix grp_transform(const DataMatrix& x, std::size_t d_out,
                         std::uint64_t seed) {
  if (d_out < 1) throw ContractError("grp: d_out must be >= 1");
  const auto d = static_cast<Eigen::Index>(x.cols());
  const auto k = static_cast<Eigen::Index>(d_out);
  Rng rng(seed);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d_out));
  Eigen::MatrixXd projection(d, k);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) projection(i, j) = stddev * rng.normal();
  }
  RowMatrix projected = x.values() * projection;
  return carry_labels(x, std::move(projected));
}

DataMatrix apply_transform(const DataMatrix& x, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kPca:
      return pca_fit_transform(x, spec.d_out);
    case TransformKind::kGrp:
      return grp_transform(x, spec.d_out, spec.seed);
    case TransformKind::kTsne:
      return tsne_fit_transform(x, spec);
  }
  throw ContractError("unknown transform kind");
}

double logistic_accuracy(const DataMatrix& z, std::uint64_t seed,
                         const LogisticParams& params) {
  if (!z.has_labels()) {
    throw ContractError("logistic_accuracy needs labeled data");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < z.rows(); ++i) by_class[z.labels()[i]].push_back(i);
  if (by_class.size() != 2) {
    throw ContractError("logistic_accuracy needs exactly 2 classes, got " +
                        std::to_string(by_class.size()));
  }
  for (const auto& [label, members] : by_class) {
    if (members.size() < 5) {
      throw ContractError("class " + std::to_string(label) + " has " +
                          std::to_string(members.size()) +
                          " samples; at least 5 are required");
    }
  }

  // Stratified split: shuffle each class, the first round(f * count) go to
  // the test fold.
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& [label, members] : by_class) {
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.below(i + 1)]);
    }
    auto n_test = static_cast<std::size_t>(
        std::llround(params.test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    test.insert(test.end(), members.begin(),
                members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(),
                 members.begin() + static_cast<std::ptrdiff_t>(n_test),
                 members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  const int positive = by_class.rbegin()->first;

  const std::size_t d = z.cols();
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (std::size_t i : train) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += z(i, c);
  }
  for (double& m : mean) m /= static_cast<double>(train.size());
  for (std::size_t i : train) {
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = z(i, c) - mean[c];
      scale[c] += diff * diff;
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(train.size()));
    if (s <= 1e-12) s = 1.0;
  }
  const auto feature = [&](std::size_t i, std::size_t c) {
    return (z(i, c) - mean[c]) / scale[c];
  };

  std::vector<double> w(d, 0.0), grad(d, 0.0);
  double b = 0.0;
  const double m = static_cast<double>(train.size());
  for (std::size_t it = 0; it < params.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i : train) {
      double s = b;
      for (std::size_t c = 0; c < d; ++c) s += w[c] * feature(i, c);
      const double y = z.labels()[i] == positive ? 1.0 : 0.0;
      const double residual = sigmoid(s) - y;
      for (std::size_t c = 0; c < d; ++c) grad[c] += residual * feature(i, c);
      grad_b += residual;
    }
    for (std::size_t c = 0; c < d; ++c) {
      w[c] -= params.step * (grad[c] / m + params.l2_penalty * w[c]);
    }
    b -= params.step * grad_b / m;
  }

  std::size_t correct = 0;
  for (std::size_t i : test) {
    double s = b;
    for (std::size_t c = 0; c < d; ++c) s += w[c] * feature(i, c);
    const bool predicted_positive = sigmoid(s) >= 0.5;
    if (predicted_positive == (z.labels()[i] == positive)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace embedlens
