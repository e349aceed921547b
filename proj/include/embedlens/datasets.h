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

#ifndef EMBEDLENS_DATASETS_H_
#define EMBEDLENS_DATASETS_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "embedlens/data_matrix.h"

namespace embedlens {

enum class DatasetKind { kBlobs, kCircles, kMoons, kSCurve, kSwissRoll };

std::string_view to_string(DatasetKind kind);
// "blobs", "circles", "moons", "s_curve", "swiss_roll".
DatasetKind parse_dataset_kind(std::string_view text);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kBlobs;
  std::size_t n_samples = 500;
  // Cluster std for blobs, additive per-coordinate noise std for shapes.
  double noise = 1.0;
  // Feature count; blobs only (shapes are 2-D or 3-D).
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  bool standardize = false;
};

struct Dataset {
  DataMatrix data;
  // Generating parameter t per row (s-curve and swiss roll); empty otherwise.
  std::vector<double> position;
  // Blobs only: how many times the centers were re-drawn because they were
  // closer than 6 * noise.
  int center_redraws = 0;
};

// Throws ContractError on an invalid spec (noise < 0, n < 4, blobs dim < 2).
void validate(const DatasetSpec& spec);

// Two Gaussian clusters. Centers uniform in [-10, 10]^dim, re-drawn until
// they are at least 6 * noise apart (at most 1000 draws). Cluster 0 gets
// ceil(n / 2) samples and comes first. Labels are cluster ids.
Dataset make_blobs(const DatasetSpec& spec);

// Outer unit circle (label 0, floor(n / 2) points) and inner circle of
// radius 0.8 (label 1), angles on the grid 2 pi i / m.
Dataset make_circles(const DatasetSpec& spec);

// Outer half circle (cos t, sin t) with label 0 (floor(n / 2) points) and
// inner half circle (1 - cos t, 1 - sin t - 0.5) with label 1; t on an
// inclusive grid over [0, pi].
Dataset make_moons(const DatasetSpec& spec);

// t ~ U(-3pi/2, 3pi/2), u ~ U(0, 1):
// (sin t, 2u, sign(t)(cos t - 1)). No labels; position = t.
Dataset make_s_curve(const DatasetSpec& spec);

// t = 1.5 pi (1 + 2u), v ~ U(0, 1): (t cos t, 21 v, t sin t).
// No labels; position = t.
Dataset make_swiss_roll(const DatasetSpec& spec);

// Dispatches on spec.kind and applies standardization when requested.
Dataset generate(const DatasetSpec& spec);

}  // namespace embedlens

#endif  // EMBEDLENS_DATASETS_H_
