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

#include "embedlens/tsne.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "embedlens/error.h"
#include "embedlens/numerics.h"
#include "embedlens/rng.h"

namespace embedlens {
namespace {

constexpr int kMaxBisectionSteps = 200;
constexpr double kPerplexityTolerance = 1e-5;

// exp(entropy) of p_j ~ exp(-beta * shifted_j); fills `p` normalized.
double conditional_perplexity(const std::vector<double>& shifted, double beta,
                              std::vector<double>& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    p[j] = std::exp(-beta * shifted[j]);
    sum += p[j];
  }
  double weighted = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    p[j] /= sum;
    weighted += shifted[j] * p[j];
  }
  return std::exp(std::log(sum) + beta * weighted);
}

}  // namespace

std::vector<double> calibrate_conditionals(const DataMatrix& x,
                                           double perplexity,
                                           std::vector<double>* realized) {
  const std::size_t n = x.rows();
  std::vector<double> conditionals(n * n, 0.0);
  if (realized) realized->assign(n, 0.0);

  std::vector<double> shifted(n - 1), p(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j == i) continue;
      shifted[c] = squared_euclidean_distance(xi, x.row(j));
      nearest = std::min(nearest, shifted[c]);
      ++c;
    }
    // Shifting by the nearest distance leaves the normalized conditional
    // unchanged and keeps exp() away from underflow.
    for (double& s : shifted) s -= nearest;

    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double current = conditional_perplexity(shifted, beta, p);
    int step = 0;
    while (std::abs(current - perplexity) > kPerplexityTolerance) {
      if (++step > kMaxBisectionSteps) {
        throw ConvergenceError(
            "perplexity calibration failed for point " + std::to_string(i) +
            " after " + std::to_string(kMaxBisectionSteps) +
            " bisection steps (perplexity " + std::to_string(current) +
            ", target " + std::to_string(perplexity) + ")");
      }
      if (current > perplexity) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
      current = conditional_perplexity(shifted, beta, p);
    }
    if (realized) (*realized)[i] = current;
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j == i) continue;
      conditionals[i * n + j] = p[c++];
    }
  }
  return conditionals;
}

TsneResult run_tsne(const DataMatrix& x, std::size_t d_out, std::uint64_t seed,
                    const TsneParams& params) {
  const std::size_t n = x.rows();
  if (n < 10) {
    throw DegenerateInputError("t-SNE needs at least 10 points, got " +
                               std::to_string(n));
  }
  if (!(params.perplexity > 0.0) ||
      !(params.perplexity < static_cast<double>(n - 1) / 3.0)) {
    throw ContractError("t-SNE perplexity " +
                        std::to_string(params.perplexity) +
                        " must be in (0, (n-1)/3) for n=" + std::to_string(n));
  }
  if (d_out < 1) throw ContractError("t-SNE d_out must be >= 1");

  TsneResult result;
  const std::vector<double> cond =
      calibrate_conditionals(x, params.perplexity, &result.realized_perplexity);

  // Symmetrized joint P, upper triangle stored in full for simple indexing.
  std::vector<double> joint(n * n, 0.0);
  const double denom = 2.0 * static_cast<double>(n);
  double p_log_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = (cond[i * n + j] + cond[j * n + i]) / denom;
      joint[i * n + j] = pij;
      joint[j * n + i] = pij;
      if (pij > 0.0) p_log_p += 2.0 * pij * std::log(pij);
    }
  }

  const std::size_t dim = d_out;
  std::vector<double> y(n * dim), update(n * dim, 0.0), gains(n * dim, 1.0),
      grad(n * dim);
  Rng rng(seed);
  const double init_std = std::sqrt(params.init_variance);
  for (double& v : y) v = init_std * rng.normal();

  std::vector<double> attract(n * dim), repulse(n * dim);
  if (params.record_kl) result.kl_trace.reserve(params.iterations);
  for (std::size_t it = 0; it < params.iterations; ++it) {
    const double exaggeration =
        it < params.exaggeration_iterations ? params.early_exaggeration : 1.0;
    const double momentum = it < params.momentum_switch
                                ? params.initial_momentum
                                : params.final_momentum;

    // One pass over the pairs i < j accumulates both gradient halves:
    //   attract_i = sum_j P_ij w_ij (y_i - y_j)
    //   repulse_i = sum_j w_ij^2 (y_i - y_j)
    // with w_ij = 1 / (1 + |y_i - y_j|^2), so that
    //   grad_i = 4 (exaggeration * attract_i - repulse_i / sum_w).
    std::fill(attract.begin(), attract.end(), 0.0);
    std::fill(repulse.begin(), repulse.end(), 0.0);
    double sum_w = 0.0;
    double p_log_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* yi = &y[i * dim];
      const double* pi = &joint[i * n];
      double* ai = &attract[i * dim];
      double* ri = &repulse[i * dim];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double* yj = &y[j * dim];
        double dist = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double diff = yi[c] - yj[c];
          dist += diff * diff;
        }
        const double w = 1.0 / (1.0 + dist);
        const double pw = pi[j] * w;
        const double ww = w * w;
        sum_w += 2.0 * w;
        if (params.record_kl) p_log_w -= 2.0 * pi[j] * std::log1p(dist);
        double* aj = &attract[j * dim];
        double* rj = &repulse[j * dim];
        for (std::size_t c = 0; c < dim; ++c) {
          const double diff = yi[c] - yj[c];
          ai[c] += pw * diff;
          aj[c] -= pw * diff;
          ri[c] += ww * diff;
          rj[c] -= ww * diff;
        }
      }
    }
    // KL(P || Q) with Q = w / sum_w and sum(P) = 1.
    if (params.record_kl) {
      result.kl_trace.push_back(p_log_p - p_log_w + std::log(sum_w));
    }
    for (std::size_t e = 0; e < n * dim; ++e) {
      grad[e] = 4.0 * (exaggeration * attract[e] - repulse[e] / sum_w);
    }

    for (std::size_t e = 0; e < n * dim; ++e) {
      const bool same_sign = (grad[e] > 0.0) == (update[e] > 0.0);
      gains[e] = same_sign ? gains[e] * 0.8 : gains[e] + 0.2;
      gains[e] = std::max(gains[e], 0.01);
      update[e] = momentum * update[e] - params.learning_rate * gains[e] * grad[e];
      y[e] += update[e];
    }
    for (std::size_t c = 0; c < dim; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y[i * dim + c];
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y[i * dim + c] -= mean;
    }
  }

  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          y[i * dim + c];
    }
  }
  result.embedding =
      x.has_labels()
          ? DataMatrix(std::move(values),
                       std::vector<int>(x.labels().begin(), x.labels().end()))
          : DataMatrix(std::move(values));
  return result;
}

DataMatrix tsne_fit_transform(const DataMatrix& x, const TransformSpec& spec) {
  TsneParams params = spec.tsne;
  params.record_kl = false;
  return run_tsne(x, spec.d_out, spec.seed, params).embedding;
}

}  // namespace embedlens
