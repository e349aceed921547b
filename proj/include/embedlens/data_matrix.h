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

#ifndef EMBEDLENS_DATA_MATRIX_H_
#define EMBEDLENS_DATA_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace embedlens {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense samples x features matrix with optional per-row integer labels.
// Every value is finite; construction rejects NaN/Inf with a ContractError.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(RowMatrix values);
  DataMatrix(RowMatrix values, std::vector<int> labels);

  // Convenience for small literal matrices, mostly in tests.
  static DataMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  // Single-feature matrix, one row per value.
  static DataMatrix column(std::span<const double> values);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  bool empty() const { return values_.size() == 0; }

  const RowMatrix& values() const { return values_; }
  double operator()(std::size_t r, std::size_t c) const {
    return values_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }

  bool has_labels() const { return labels_.has_value(); }
  // Empty span when unlabeled.
  std::span<const int> labels() const {
    return labels_ ? std::span<const int>(*labels_) : std::span<const int>();
  }

  // Same values, labels replaced (or attached).
  DataMatrix with_labels(std::vector<int> labels) const;
  DataMatrix without_labels() const;

  friend bool operator==(const DataMatrix& a, const DataMatrix& b);

 private:
  RowMatrix values_;
  std::optional<std::vector<int>> labels_;
};

}  // namespace embedlens

#endif  // EMBEDLENS_DATA_MATRIX_H_
