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

#ifndef EMBEDLENS_NUMERICS_H_
#define EMBEDLENS_NUMERICS_H_

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Core>

#include "embedlens/data_matrix.h"

namespace embedlens {

// Unbiased sample covariance of the rows of `x` (divisor n - 1).
// Throws DegenerateInputError for fewer than two rows.
Eigen::MatrixXd covariance(const DataMatrix& x);

enum class InversionStrategy { kExact, kPseudoInverse, kRidge };

// How to invert a covariance matrix. The exact inverse is taken whenever the
// condition number sigma_max / sigma_min is below `max_condition`; otherwise
// `fallback` decides. kNone turns an ill-conditioned matrix into a
// SingularMatrixError.
struct InversionPolicy {
  enum class Fallback { kPseudoInverse, kRidge, kNone };

  Fallback fallback = Fallback::kPseudoInverse;
  double max_condition = 1e12;
  // Singular values below pinv_cutoff * sigma_max are dropped.
  double pinv_cutoff = 1e-10;
  double ridge_lambda = 1e-6;

  static InversionPolicy exact() { return {Fallback::kNone}; }
  static InversionPolicy pseudo_inverse() { return {}; }
  static InversionPolicy ridge(double lambda) {
    InversionPolicy p;
    p.fallback = Fallback::kRidge;
    p.ridge_lambda = lambda;
    return p;
  }
};

struct CovarianceModel {
  Eigen::MatrixXd cov;
  // Matrix used in place of cov^-1 (exact, pseudo- or ridge inverse).
  Eigen::MatrixXd inv;
  InversionStrategy strategy = InversionStrategy::kExact;
  double ridge_lambda = 0.0;
  std::size_t source_dim = 0;
  std::size_t source_n = 0;

  // "exact", "pseudo_inverse" or "ridge(<lambda>)".
  std::string strategy_name() const;
};

// Inverts a symmetric matrix under `policy`. Throws ContractError when `s`
// is not square or not symmetric, SingularMatrixError when the policy forbids
// a fallback and the matrix is ill-conditioned.
CovarianceModel invert_covariance(const Eigen::MatrixXd& s,
                                  const InversionPolicy& policy = {},
                                  std::size_t source_n = 0);

// covariance() followed by invert_covariance().
CovarianceModel fit_covariance_model(const DataMatrix& x,
                                     const InversionPolicy& policy = {});

// sqrt((a-b)^T inv (a-b)); a negative quadratic form (pseudo-inverse
// round-off) is clamped to 0.
double mahalanobis_distance(std::span<const double> a, std::span<const double> b,
                            const CovarianceModel& model);

double squared_euclidean_distance(std::span<const double> a,
                                  std::span<const double> b);

// Column-wise z-scores: mean 0, population std 1. Columns with (numerically)
// zero variance are centered and left unscaled. Labels are preserved.
DataMatrix standardize(const DataMatrix& x);

}  // namespace embedlens

#endif  // EMBEDLENS_NUMERICS_H_
