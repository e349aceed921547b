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

#include "embedlens/data_matrix.h"

#include <cmath>
#include <string>
#include <utility>

#include "embedlens/error.h"

namespace embedlens {
namespace {

void check_finite(const RowMatrix& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (!std::isfinite(values(r, c))) {
        throw ContractError("non-finite value at row " + std::to_string(r) +
                            ", column " + std::to_string(c));
      }
    }
  }
}

}  // namespace

DataMatrix::DataMatrix(RowMatrix values) : values_(std::move(values)) {
  check_finite(values_);
}

DataMatrix::DataMatrix(RowMatrix values, std::vector<int> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  check_finite(values_);
  if (labels_->size() != rows()) {
    throw ContractError("label count " + std::to_string(labels_->size()) +
                        " does not match row count " + std::to_string(rows()));
  }
}

DataMatrix DataMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  RowMatrix m(n, d);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != d) {
      throw ContractError("ragged row " + std::to_string(r));
    }
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return DataMatrix(std::move(m));
}

DataMatrix DataMatrix::column(std::span<const double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return DataMatrix(std::move(m));
}

DataMatrix DataMatrix::with_labels(std::vector<int> labels) const {
  return DataMatrix(values_, std::move(labels));
}

DataMatrix DataMatrix::without_labels() const { return DataMatrix(values_); }

bool operator==(const DataMatrix& a, const DataMatrix& b) {
  return a.values_.rows() == b.values_.rows() &&
         a.values_.cols() == b.values_.cols() && a.values_ == b.values_ &&
         a.labels_ == b.labels_;
}

}  // namespace embedlens
