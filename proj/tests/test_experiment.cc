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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "embedlens/error.h"
#include "embedlens/experiment.h"
#include "embedlens/matrix_csv.h"
#include "embedlens/rng.h"
#include "json.hpp"
#include "oracles.h"

namespace embedlens {
namespace {

using nlohmann::json;

json small_config_doc() {
  return json::parse(R"({
    "datasets": [{"kind": "blobs", "n_samples": 60},
                 {"kind": "moons", "n_samples": 60, "noise_levels": [0.1]}],
    "noise_levels": [0.6, 1.5],
    "dims": [2, 8],
    "transforms": [
      {"kind": "pca", "d_out": 2},
      {"kind": "grp", "d_out": 2},
      {"kind": "tsne", "d_out": 2, "perplexity": 8, "iterations": 120,
       "exaggeration_iterations": 50, "momentum_switch": 50}
    ],
    "metrics": [
      {"name": "ar", "k": 5}, {"name": "anr", "k": 3}, {"name": "mrr"},
      {"name": "trustworthiness", "k": 5}, {"name": "continuity", "k": 5},
      {"name": "idpe", "k": 5, "mode": "box1"},
      {"name": "idpe", "k": 5, "mode": "consistent"},
      {"name": "accuracy"}
    ],
    "repetitions": 2,
    "base_seed": 40,
    "output_path": "out.csv"
  })");
}

std::filesystem::path scratch_dir() {
  const auto dir =
      std::filesystem::temp_directory_path() / "embedlens_experiment_test";
  std::filesystem::create_directories(dir);
  return dir;
}

TEST_CASE("config parsing, echo, and rejection of unknown fields") {
  const json doc = small_config_doc();
  const ExperimentConfig c = parse_config(doc);
  CHECK(c.datasets.size() == 2);
  CHECK(c.datasets[1].noise_levels->size() == 1);
  CHECK(c.transforms[2].tsne.iterations == 120);
  CHECK(c.metrics[6].mode == IdpeMode::kConsistent);
  CHECK(c.inversion.fallback == InversionPolicy::Fallback::kPseudoInverse);

  const json echo = to_json(c);
  CHECK(to_json(parse_config(echo)) == echo);
  for (const auto& [key, value] : doc.items()) {
    if (key == "datasets" || key == "transforms" || key == "metrics") continue;
    CHECK(echo.at(key) == value);
  }
  for (std::size_t i = 0; i < doc["metrics"].size(); ++i) {
    for (const auto& [key, value] : doc["metrics"][i].items()) {
      CHECK(echo["metrics"][i].at(key) == value);
    }
  }
  for (std::size_t i = 0; i < doc["transforms"].size(); ++i) {
    for (const auto& [key, value] : doc["transforms"][i].items()) {
      CHECK(echo["transforms"][i].at(key) == value);
    }
  }

  json bad = doc;
  bad["repetitons"] = 3;
  CHECK_THROWS_AS(parse_config(bad), ContractError);
  bad = doc;
  bad["metrics"][0]["kk"] = 3;
  CHECK_THROWS_AS(parse_config(bad), ContractError);
  bad = doc;
  bad["metrics"][0]["name"] = "stress";
  CHECK_THROWS_AS(parse_config(bad), ContractError);
}

TEST_CASE("validation enforces metric preconditions at the smallest n") {
  json doc = small_config_doc();
  CHECK_NOTHROW(validate(parse_config(doc)));

  doc["repetitions"] = 0;
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);

  doc = small_config_doc();
  doc["metrics"][3]["k"] = 20;  // 2*60 - 3*20 - 1 = 59 > 0
  CHECK_NOTHROW(validate(parse_config(doc)));
  doc["metrics"][3]["k"] = 40;  // 120 - 120 - 1 < 0
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);

  doc = small_config_doc();
  doc["metrics"][0]["k"] = 60;
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);

  doc = small_config_doc();
  doc["metrics"].push_back({{"name", "ar"}, {"k", 5}});
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);
  doc = small_config_doc();
  doc["metrics"].push_back(
      {{"name", "idpe"}, {"k", 5}, {"mode", "box1"}, {"include_self", false}});
  CHECK_NOTHROW(validate(parse_config(doc)));

  doc = small_config_doc();
  doc["transforms"][0]["d_out"] = 3;  // moons are 2-D
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);

  doc = small_config_doc();
  doc["transforms"][2]["perplexity"] = 20;  // (60 - 1) / 3 < 20
  CHECK_THROWS_AS(validate(parse_config(doc)), ContractError);
}

TEST_CASE("mode tags keep row keys unique") {
  MetricSpec m;
  m.name = "idpe";
  CHECK(m.mode_tag() == "box1");
  m.include_self = false;
  CHECK(m.mode_tag() == "box1_noself");
  m.mode = IdpeMode::kConsistent;
  CHECK(m.mode_tag() == "consistent");
  m.include_self = true;
  CHECK(m.mode_tag() == "consistent_self");
  m.name = "ar";
  CHECK(m.mode_tag().empty());
  m.name = "mrr";
  CHECK(m.k_column() == 1);
}

TEST_CASE("cell enumeration and row counts") {
  const ExperimentConfig c = parse_config(small_config_doc());
  // blobs: 2 noise x 2 dims, moons: 1 noise x 1 dim; 3 transforms, 2 reps.
  CHECK(enumerate_cells(c).size() == (4 + 1) * 3 * 2);

  const ExperimentConfig suite = load_config(
      std::filesystem::path(EMBEDLENS_SOURCE_DIR) / "configs/blobs_suite.json");
  CHECK_NOTHROW(validate(suite));
  CHECK(enumerate_cells(suite).size() * suite.metrics.size() == 1890);

  ExperimentConfig one = c;
  one.datasets.resize(1);
  one.noise_levels = {1.0};
  one.dims = {2};
  one.transforms.resize(1);
  one.repetitions = 1;
  const auto rows = run_experiment(one);
  CHECK(rows.size() == one.metrics.size());
  for (const ResultRow& r : rows) {
    CHECK_FALSE(r.failed());
    CHECK(std::isfinite(r.value));
    CHECK(r.seed == 40);
    CHECK(r.wall_time_ms == 0.0);
  }
}

TEST_CASE("sweep: determinism across jobs, ordering, round trip, summary") {
  const ExperimentConfig c = parse_config(small_config_doc());
  const auto serial = run_experiment(c, 1);
  const auto parallel = run_experiment(c, 3);
  const std::string text = format_results_csv(serial);
  CHECK(text == format_results_csv(parallel));
  CHECK(text == format_results_csv(run_experiment(c, 1)));
  CHECK(serial.size() == enumerate_cells(c).size() * c.metrics.size());

  std::set<std::tuple<std::string, double, std::size_t, std::string,
                      std::string, std::string, std::size_t, std::size_t>>
      keys;
  for (const ResultRow& r : serial) {
    keys.emplace(r.dataset, r.noise, r.dim, r.transform, r.metric, r.mode, r.k,
                 r.repetition);
  }
  CHECK(keys.size() == serial.size());

  CHECK(text.rfind(std::string(kResultsHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(format_results_csv(parse_results_csv(text)) == text);
  CHECK(count_failed_cells(serial) == 0);

  // Independent recomputation of the per-cell mean and sample std.
  std::map<std::string, std::vector<double>> groups;
  for (const ResultRow& r : serial) {
    groups[r.dataset + "|" + format_real(r.noise) + "|" +
           std::to_string(r.dim) + "|" + r.transform + "|" + r.metric + "|" +
           r.mode + "|" + std::to_string(r.k)]
        .push_back(r.value);
  }
  const auto summary = summarize(serial);
  CHECK(summary.size() == groups.size());
  for (const SummaryRow& s : summary) {
    const auto& v = groups.at(s.dataset + "|" + format_real(s.noise) + "|" +
                              std::to_string(s.dim) + "|" + s.transform + "|" +
                              s.metric + "|" + s.mode + "|" +
                              std::to_string(s.k));
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    CHECK(s.count == v.size());
    CHECK(std::abs(s.mean - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
    CHECK(std::abs(s.std - sd) <= 1e-12 * std::max(1.0, sd));
  }
}

TEST_CASE("a failing cell is isolated and counted") {
  json doc = json::parse(R"({
    "datasets": [{"kind": "s_curve", "n_samples": 40},
                 {"kind": "blobs", "n_samples": 40}],
    "noise_levels": [0.5], "dims": [2],
    "transforms": [{"kind": "pca", "d_out": 2}],
    "metrics": [{"name": "ar", "k": 3}, {"name": "accuracy"}],
    "repetitions": 2
  })");
  const auto rows = run_experiment(parse_config(doc), 2);
  REQUIRE(rows.size() == 8);
  for (const ResultRow& r : rows) {
    const bool should_fail = r.dataset == "s_curve" && r.metric == "accuracy";
    CHECK(r.failed() == should_fail);
    CHECK(std::isnan(r.value) == should_fail);
    if (should_fail) CHECK(r.inversion_strategy == "error");
  }
  CHECK(count_failed_cells(rows) == 2);
  const std::string csv = format_results_csv(rows);
  CHECK(csv.find(",nan,error,") != std::string::npos);
  CHECK(format_results_csv(parse_results_csv(csv)) == csv);
  for (const SummaryRow& s : summarize(rows)) {
    if (s.dataset == "s_curve" && s.metric == "accuracy") {
      CHECK(s.failed == 2);
      CHECK(s.count == 0);
    }
  }

  // Under the exact policy the IDPE of a rank-deficient cell fails alone.
  doc["datasets"] = json::parse(R"([{"kind": "blobs", "n_samples": 20}])");
  doc["dims"] = {40};
  doc["metrics"] = json::parse(R"([{"name": "ar", "k": 3},
                                    {"name": "idpe", "k": 3}])");
  doc["inversion"] = {{"fallback", "exact"}};
  const auto exact = run_experiment(parse_config(doc));
  REQUIRE(exact.size() == 4);
  CHECK_FALSE(exact[0].failed());
  CHECK(exact[1].failed());
  CHECK(exact[1].error.find("singular") != std::string::npos);
}

TEST_CASE("write_results in both formats") {
  const auto dir = scratch_dir();
  ExperimentConfig c = parse_config(small_config_doc());
  ResultRow row;
  row.dataset = "blobs";
  row.noise = 0.6;
  row.dim = 2;
  row.transform = "pca";
  row.metric = "ar";
  row.k = 5;
  row.value = 1.0 / 3.0;
  write_results({row}, dir / "one.csv", ResultFormat::kCsv, c);
  const std::string csv = read_text_file(dir / "one.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(parse_results_csv(csv)[0].value == row.value);

  write_results({row}, dir / "one.json", ResultFormat::kJson, c);
  const json doc = json::parse(read_text_file(dir / "one.json"));
  CHECK(doc["config"] == to_json(c));
  CHECK(doc["rows"][0]["metric"] == "ar");
  CHECK(doc["failed_cells"] == 0);

  CHECK_THROWS_AS(write_results({}, dir / "none.csv", ResultFormat::kCsv, c),
                  ContractError);
  CHECK_THROWS_AS(write_results({row}, dir / "no/such/dir/x.csv",
                                ResultFormat::kCsv, c),
                  IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("evaluate_pair on files") {
  const auto dir = scratch_dir();
  Rng rng(8);
  const DataMatrix x = oracle::random_matrix(30, 4, rng);
  write_matrix_csv(x, dir / "x.csv");
  write_matrix_csv(DataMatrix(x.values().topRows(29)), dir / "short.csv");

  EvaluateOptions opts;
  const auto self = evaluate_pair(dir / "x.csv", dir / "x.csv", opts);
  REQUIRE(self.size() == 6);
  CHECK(self[3].metric == "trustworthiness");
  CHECK(self[3].value == 1.0);

  try {
    evaluate_pair(dir / "x.csv", dir / "short.csv", opts);
    FAIL("expected a row count error");
  } catch (const ContractError& e) {
    const std::string what = e.what();
    CHECK(what.find("30") != std::string::npos);
    CHECK(what.find("29") != std::string::npos);
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("evaluate on a rank-deficient 512-dim original") {
  Rng rng(9);
  const DataMatrix x = oracle::random_matrix(500, 512, rng);
  const DataMatrix z(x.values().leftCols(2));
  const auto reports = evaluate_matrices(x, z, {});
  REQUIRE(reports.size() == 6);
  CHECK(reports[5].inversion_strategy == "pseudo_inverse");
  for (const MetricReport& r : reports) CHECK(std::isfinite(r.value));
}

}  // namespace
}  // namespace embedlens
