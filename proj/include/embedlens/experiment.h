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

#ifndef EMBEDLENS_EXPERIMENT_H_
#define EMBEDLENS_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "embedlens/datasets.h"
#include "embedlens/metrics.h"
#include "embedlens/numerics.h"
#include "embedlens/transforms.h"

namespace embedlens {

// One configured metric. `name` is one of ar, anr, mrr, trustworthiness,
// continuity, idpe, accuracy.
struct MetricSpec {
  std::string name;
  std::size_t k = kDefaultK;
  IdpeMode mode = IdpeMode::kBox1;
  std::optional<bool> include_self;

  // Value written to the `mode` column: empty except for idpe, where it is
  // the mode name, suffixed with _self / _noself when include_self departs
  // from that mode's default.
  std::string mode_tag() const;
  // Value written to the `k` column: 1 for mrr, 0 for accuracy.
  std::size_t k_column() const;
};

struct DatasetEntry {
  DatasetSpec spec;
  // Per-dataset overrides of the global noise levels / dims.
  std::optional<std::vector<double>> noise_levels;
  std::optional<std::vector<std::size_t>> dims;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<double> noise_levels;
  // Blobs only; shapes use their native dimension.
  std::vector<std::size_t> dims;
  std::vector<TransformSpec> transforms;
  std::vector<MetricSpec> metrics;
  std::size_t repetitions = 10;
  std::uint64_t base_seed = 0;
  std::string output_path;
  InversionPolicy inversion;
  // Off by default so that output files are byte-reproducible; when off the
  // wall_time_ms column is 0.
  bool record_timing = false;
};

// Parses and validates a config document. Throws ContractError naming the
// offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical JSON form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);
// Checks repetitions, metric preconditions for the smallest configured n and
// row-key uniqueness. Throws ContractError.
void validate(const ExperimentConfig& config);

struct ResultRow {
  std::string dataset;
  double noise = 0.0;
  std::size_t dim = 0;
  std::string transform;
  std::string metric;
  std::string mode;
  std::size_t k = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  // "error" on failed rows, whose value is NaN.
  std::string inversion_strategy;
  double wall_time_ms = 0.0;
  // Not part of the CSV.
  std::string error;

  bool failed() const { return !error.empty() || inversion_strategy == "error"; }
};

inline constexpr std::string_view kResultsHeader =
    "dataset,noise,dim,transform,metric,mode,k,repetition,seed,value,"
    "inversion_strategy,wall_time_ms";

struct CellKey {
  std::string dataset;
  double noise = 0.0;
  std::size_t dim = 0;
  std::string transform;
  std::size_t repetition = 0;
};

// Every cell in emission order: dataset, noise, dim, transform, repetition,
// each in config order.
std::vector<CellKey> enumerate_cells(const ExperimentConfig& config);

// Runs the whole sweep on `jobs` worker threads. Output order and content do
// not depend on `jobs`. Failed cells yield rows marked as errors.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::size_t jobs = 1);

std::string format_results_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(std::string_view text,
                                         std::string_view source = "<memory>");
nlohmann::json results_to_json(const std::vector<ResultRow>& rows,
                               const ExperimentConfig& config);

enum class ResultFormat { kCsv, kJson };

// Throws ContractError on empty rows, IoError when the path is unwritable.
void write_results(const std::vector<ResultRow>& rows,
                   const std::filesystem::path& path, ResultFormat format,
                   const ExperimentConfig& config);

// Mean/std/min/max over the repetitions of one grid cell. std is the sample
// standard deviation (n - 1), 0 for a single value. Failed rows are counted
// but excluded from the statistics.
struct SummaryRow {
  std::string dataset;
  double noise = 0.0;
  std::size_t dim = 0;
  std::string transform;
  std::string metric;
  std::string mode;
  std::size_t k = 0;
  std::size_t count = 0;
  std::size_t failed = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);
std::size_t count_failed_cells(const std::vector<ResultRow>& rows);

struct EvaluateOptions {
  // Defaults to the six embedding metrics at k = 5 (idpe in box1 mode).
  std::vector<MetricSpec> metrics;
  InversionPolicy inversion;
  std::uint64_t seed = 0;
};

std::vector<MetricSpec> default_metrics(std::size_t k = kDefaultK,
                                        IdpeMode mode = IdpeMode::kBox1);

std::vector<MetricReport> evaluate_matrices(const DataMatrix& original,
                                            const DataMatrix& embedding,
                                            const EvaluateOptions& options);
std::vector<MetricReport> evaluate_pair(const std::filesystem::path& original,
                                        const std::filesystem::path& embedding,
                                        const EvaluateOptions& options);

nlohmann::json to_json(const MetricReport& report);

}  // namespace embedlens

#endif  // EMBEDLENS_EXPERIMENT_H_
