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

#include "embedlens/datasets.h"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "embedlens/error.h"
#include "embedlens/numerics.h"
#include "embedlens/rng.h"

namespace embedlens {
namespace {

constexpr int kMaxCenterRedraws = 1000;
constexpr double kCircleFactor = 0.8;

void add_noise(RowMatrix& m, double noise, Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) += noise * rng.normal();
  }
}

Dataset finish(const DatasetSpec& spec, RowMatrix values,
               std::vector<int> labels, std::vector<double> position = {}) {
  Dataset out;
  out.data = labels.empty() ? DataMatrix(std::move(values))
                            : DataMatrix(std::move(values), std::move(labels));
  if (spec.standardize) out.data = standardize(out.data);
  out.position = std::move(position);
  return out;
}

void expect_kind(const DatasetSpec& spec, DatasetKind kind) {
  validate(spec);
  if (spec.kind != kind) {
    throw ContractError("dataset spec kind is " +
                        std::string(to_string(spec.kind)) + ", expected " +
                        std::string(to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kBlobs:
      return "blobs";
    case DatasetKind::kCircles:
      return "circles";
    case DatasetKind::kMoons:
      return "moons";
    case DatasetKind::kSCurve:
      return "s_curve";
    case DatasetKind::kSwissRoll:
      return "swiss_roll";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  if (text == "blobs") return DatasetKind::kBlobs;
  if (text == "circles") return DatasetKind::kCircles;
  if (text == "moons") return DatasetKind::kMoons;
  if (text == "s_curve") return DatasetKind::kSCurve;
  if (text == "swiss_roll") return DatasetKind::kSwissRoll;
  throw ContractError("unknown dataset kind '" + std::string(text) + "'");
}

void validate(const DatasetSpec& spec) {
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    throw ContractError("dataset noise must be a finite value >= 0");
  }
  if (spec.n_samples < 4) {
    throw ContractError("dataset needs at least 4 samples, got " +
                        std::to_string(spec.n_samples));
  }
  if (spec.kind == DatasetKind::kBlobs && spec.dim < 2) {
    throw ContractError("blobs dim must be >= 2, got " +
                        std::to_string(spec.dim));
  }
}

Dataset make_blobs(const DatasetSpec& spec) {
  expect_kind(spec, DatasetKind::kBlobs);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  const auto d = static_cast<Eigen::Index>(spec.dim);
  Rng rng(spec.seed);

  Eigen::MatrixXd centers(2, d);
  const double min_separation = 6.0 * spec.noise;
  int redraws = 0;
  while (true) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      for (Eigen::Index j = 0; j < d; ++j) centers(c, j) = rng.uniform(-10, 10);
    }
    if ((centers.row(0) - centers.row(1)).norm() >= min_separation ||
        redraws == kMaxCenterRedraws) {
      break;
    }
    ++redraws;
  }

  const Eigen::Index n0 = n - n / 2;
  RowMatrix values(n, d);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = i < n0 ? 0 : 1;
    labels[static_cast<std::size_t>(i)] = label;
    for (Eigen::Index j = 0; j < d; ++j) {
      values(i, j) = centers(label, j) + spec.noise * rng.normal();
    }
  }
  Dataset out = finish(spec, std::move(values), std::move(labels));
  out.center_redraws = redraws;
  return out;
}

Dataset make_circles(const DatasetSpec& spec) {
  expect_kind(spec, DatasetKind::kCircles);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  const Eigen::Index n_out = n / 2;
  const Eigen::Index n_in = n - n_out;
  Rng rng(spec.seed);

  RowMatrix values(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n_out; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                         static_cast<double>(n_out);
    values(i, 0) = std::cos(angle);
    values(i, 1) = std::sin(angle);
    labels[static_cast<std::size_t>(i)] = 0;
  }
  for (Eigen::Index i = 0; i < n_in; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                         static_cast<double>(n_in);
    values(n_out + i, 0) = kCircleFactor * std::cos(angle);
    values(n_out + i, 1) = kCircleFactor * std::sin(angle);
    labels[static_cast<std::size_t>(n_out + i)] = 1;
  }
  add_noise(values, spec.noise, rng);
  return finish(spec, std::move(values), std::move(labels));
}

Dataset make_moons(const DatasetSpec& spec) {
  expect_kind(spec, DatasetKind::kMoons);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  const Eigen::Index n_out = n / 2;
  const Eigen::Index n_in = n - n_out;
  Rng rng(spec.seed);

  const auto grid = [](Eigen::Index i, Eigen::Index count) {
    return std::numbers::pi * static_cast<double>(i) /
           static_cast<double>(count - 1);
  };
  RowMatrix values(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n_out; ++i) {
    const double t = grid(i, n_out);
    values(i, 0) = std::cos(t);
    values(i, 1) = std::sin(t);
    labels[static_cast<std::size_t>(i)] = 0;
  }
  for (Eigen::Index i = 0; i < n_in; ++i) {
    const double t = grid(i, n_in);
    values(n_out + i, 0) = 1.0 - std::cos(t);
    values(n_out + i, 1) = 1.0 - std::sin(t) - 0.5;
    labels[static_cast<std::size_t>(n_out + i)] = 1;
  }
  add_noise(values, spec.noise, rng);
  return finish(spec, std::move(values), std::move(labels));
}

Dataset make_s_curve(const DatasetSpec& spec) {
  expect_kind(spec, DatasetKind::kSCurve);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  Rng rng(spec.seed);

  std::vector<double> t(static_cast<std::size_t>(n));
  for (double& v : t) v = 3.0 * std::numbers::pi * (rng.uniform() - 0.5);
  RowMatrix values(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) values(i, 1) = 2.0 * rng.uniform();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    const double sign = ti > 0.0 ? 1.0 : (ti < 0.0 ? -1.0 : 0.0);
    values(i, 0) = std::sin(ti);
    values(i, 2) = sign * (std::cos(ti) - 1.0);
  }
  add_noise(values, spec.noise, rng);
  return finish(spec, std::move(values), {}, std::move(t));
}

Dataset make_swiss_roll(const DatasetSpec& spec) {
  expect_kind(spec, DatasetKind::kSwissRoll);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  Rng rng(spec.seed);

  std::vector<double> t(static_cast<std::size_t>(n));
  for (double& v : t) v = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
  RowMatrix values(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) values(i, 1) = 21.0 * rng.uniform();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    values(i, 0) = ti * std::cos(ti);
    values(i, 2) = ti * std::sin(ti);
  }
  add_noise(values, spec.noise, rng);
  return finish(spec, std::move(values), {}, std::move(t));
}

Dataset generate(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::kBlobs:
      return make_blobs(spec);
    case DatasetKind::kCircles:
      return make_circles(spec);
    case DatasetKind::kMoons:
      return make_moons(spec);
    case DatasetKind::kSCurve:
      return make_s_curve(spec);
    case DatasetKind::kSwissRoll:
      return make_swiss_roll(spec);
  }
  throw ContractError("unknown dataset kind");
}

}  // namespace embedlens
