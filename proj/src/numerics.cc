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

#include "embedlens/numerics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "embedlens/error.h"

namespace embedlens {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::MatrixXd lu_inverse(const Eigen::MatrixXd& s) {
  return s.partialPivLu().inverse();
}

}  // namespace

Eigen::MatrixXd covariance(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) {
    throw DegenerateInputError("covariance needs at least 2 rows, got " +
                               std::to_string(n));
  }
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  Eigen::MatrixXd centered(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t c = 0; c < d; ++c) {
      centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          row[c] - mean[c];
    }
  }
  Eigen::MatrixXd cov = centered.transpose() * centered;
  cov /= static_cast<double>(n - 1);
  // The product is symmetric up to summation order; make it exactly so.
  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  return sym;
}

std::string CovarianceModel::strategy_name() const {
  switch (strategy) {
    case InversionStrategy::kExact:
      return "exact";
    case InversionStrategy::kPseudoInverse:
      return "pseudo_inverse";
    case InversionStrategy::kRidge:
      return "ridge(" + format_double(ridge_lambda) + ")";
  }
  return "unknown";
}

CovarianceModel invert_covariance(const Eigen::MatrixXd& s,
                                  const InversionPolicy& policy,
                                  std::size_t source_n) {
  if (s.rows() != s.cols()) {
    throw ContractError("covariance matrix must be square, got " +
                        std::to_string(s.rows()) + "x" +
                        std::to_string(s.cols()));
  }
  if (s.size() == 0) throw ContractError("covariance matrix is empty");
  if (!s.allFinite()) throw ContractError("covariance matrix is not finite");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw ContractError("covariance matrix is not symmetric (max |S - S^T| = " +
                        format_double(asym) + ")");
  }

  CovarianceModel model;
  model.cov = s;
  model.source_dim = static_cast<std::size_t>(s.rows());
  model.source_n = source_n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw SingularMatrixError("eigendecomposition of covariance failed");
  }
  const Eigen::VectorXd sigma = eig.eigenvalues().cwiseAbs();
  const double sigma_max = sigma.maxCoeff();
  const double sigma_min = sigma.minCoeff();
  const double condition = sigma_min > 0.0
                               ? sigma_max / sigma_min
                               : std::numeric_limits<double>::infinity();

  if (condition < policy.max_condition) {
    model.inv = lu_inverse(s);
    model.strategy = InversionStrategy::kExact;
    return model;
  }

  switch (policy.fallback) {
    case InversionPolicy::Fallback::kNone:
      throw SingularMatrixError(
          "covariance matrix is singular or ill-conditioned (condition " +
          format_double(condition) + ") and the exact policy forbids fallback");
    case InversionPolicy::Fallback::kRidge: {
      const Eigen::MatrixXd regularized =
          s + policy.ridge_lambda *
                  Eigen::MatrixXd::Identity(s.rows(), s.cols());
      model.inv = lu_inverse(regularized);
      model.strategy = InversionStrategy::kRidge;
      model.ridge_lambda = policy.ridge_lambda;
      return model;
    }
    case InversionPolicy::Fallback::kPseudoInverse:
      break;
  }

  const double cutoff = policy.pinv_cutoff * sigma_max;
  Eigen::VectorXd inv_values = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      inv_values(i) = 1.0 / eig.eigenvalues()(i);
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd pinv = v * inv_values.asDiagonal() * v.transpose();
  model.inv = 0.5 * (pinv + pinv.transpose());
  model.strategy = InversionStrategy::kPseudoInverse;
  return model;
}

CovarianceModel fit_covariance_model(const DataMatrix& x,
                                     const InversionPolicy& policy) {
  return invert_covariance(covariance(x), policy, x.rows());
}

double mahalanobis_distance(std::span<const double> a, std::span<const double> b,
                            const CovarianceModel& model) {
  if (a.size() != b.size() || a.size() != model.source_dim) {
    throw ContractError("mahalanobis_distance: dimension mismatch (" +
                        std::to_string(a.size()) + ", " +
                        std::to_string(b.size()) + ", model " +
                        std::to_string(model.source_dim) + ")");
  }
  const auto d = static_cast<Eigen::Index>(a.size());
  Eigen::VectorXd delta(d);
  for (Eigen::Index i = 0; i < d; ++i) delta(i) = a[i] - b[i];
  const double q = delta.dot(model.inv * delta);
  return std::sqrt(std::max(0.0, q));
}

double squared_euclidean_distance(std::span<const double> a,
                                  std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

DataMatrix standardize(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) {
    throw DegenerateInputError("standardize needs at least 2 rows, got " +
                               std::to_string(n));
  }
  RowMatrix out = x.values();
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    double sum = 0.0;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += x(i, c);
      max_abs = std::max(max_abs, std::abs(x(i, c)));
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = x(i, c) - mean;
      ss += diff * diff;
    }
    double stddev = std::sqrt(ss / static_cast<double>(n));
    // Round-off in the mean leaves a tiny spread on constant columns.
    if (stddev <= 1e-12 * std::max(1.0, max_abs)) stddev = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      out(static_cast<Eigen::Index>(i), col) = (x(i, c) - mean) / stddev;
    }
  }
  if (x.has_labels()) {
    return DataMatrix(std::move(out),
                      std::vector<int>(x.labels().begin(), x.labels().end()));
  }
  return DataMatrix(std::move(out));
}

}  // namespace embedlens
