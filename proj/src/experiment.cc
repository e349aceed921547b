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

#include "embedlens/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include "embedlens/error.h"
#include "embedlens/matrix_csv.h"

namespace embedlens {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kMetricNames = {
    "ar", "anr", "mrr", "trustworthiness", "continuity", "idpe", "accuracy"};

void reject_unknown_keys(const json& obj, std::string_view where,
                         std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ContractError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ContractError("unknown field '" + key + "' in " +
                          std::string(where));
    }
  }
}

template <typename T>
T get_field(const json& obj, std::string_view where, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ContractError(std::string(where) + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& obj, std::string_view where, const char* key,
                   T& out) {
  if (obj.contains(key)) out = get_field<T>(obj, where, key);
}

std::string_view fallback_name(InversionPolicy::Fallback f) {
  switch (f) {
    case InversionPolicy::Fallback::kPseudoInverse:
      return "pseudo_inverse";
    case InversionPolicy::Fallback::kRidge:
      return "ridge";
    case InversionPolicy::Fallback::kNone:
      return "exact";
  }
  return "unknown";
}

InversionPolicy::Fallback parse_fallback(std::string_view text) {
  if (text == "pseudo_inverse") return InversionPolicy::Fallback::kPseudoInverse;
  if (text == "ridge") return InversionPolicy::Fallback::kRidge;
  if (text == "exact") return InversionPolicy::Fallback::kNone;
  throw ContractError("inversion.fallback must be pseudo_inverse, ridge or "
                      "exact, got '" + std::string(text) + "'");
}

MetricSpec parse_metric(const json& obj, std::size_t index) {
  const std::string where = "metrics[" + std::to_string(index) + "]";
  reject_unknown_keys(obj, where, {"name", "k", "mode", "include_self"});
  MetricSpec m;
  m.name = get_field<std::string>(obj, where, "name");
  if (!kMetricNames.contains(m.name)) {
    throw ContractError(where + ".name: unknown metric '" + m.name + "'");
  }
  read_optional(obj, where, "k", m.k);
  if (obj.contains("mode")) {
    m.mode = parse_idpe_mode(get_field<std::string>(obj, where, "mode"));
  }
  if (obj.contains("include_self")) {
    m.include_self = get_field<bool>(obj, where, "include_self");
  }
  return m;
}

TransformSpec parse_transform(const json& obj, std::size_t index) {
  const std::string where = "transforms[" + std::to_string(index) + "]";
  reject_unknown_keys(
      obj, where,
      {"kind", "d_out", "perplexity", "iterations", "learning_rate",
       "early_exaggeration", "exaggeration_iterations", "initial_momentum",
       "final_momentum", "momentum_switch", "init_variance"});
  TransformSpec t;
  t.kind = parse_transform_kind(get_field<std::string>(obj, where, "kind"));
  read_optional(obj, where, "d_out", t.d_out);
  read_optional(obj, where, "perplexity", t.tsne.perplexity);
  read_optional(obj, where, "iterations", t.tsne.iterations);
  read_optional(obj, where, "learning_rate", t.tsne.learning_rate);
  read_optional(obj, where, "early_exaggeration", t.tsne.early_exaggeration);
  read_optional(obj, where, "exaggeration_iterations",
                t.tsne.exaggeration_iterations);
  read_optional(obj, where, "initial_momentum", t.tsne.initial_momentum);
  read_optional(obj, where, "final_momentum", t.tsne.final_momentum);
  read_optional(obj, where, "momentum_switch", t.tsne.momentum_switch);
  read_optional(obj, where, "init_variance", t.tsne.init_variance);
  return t;
}

DatasetEntry parse_dataset(const json& obj, std::size_t index) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  reject_unknown_keys(obj, where,
                      {"kind", "n_samples", "standardize", "noise_levels",
                       "dims"});
  DatasetEntry e;
  e.spec.kind = parse_dataset_kind(get_field<std::string>(obj, where, "kind"));
  read_optional(obj, where, "n_samples", e.spec.n_samples);
  read_optional(obj, where, "standardize", e.spec.standardize);
  if (obj.contains("noise_levels")) {
    e.noise_levels =
        get_field<std::vector<double>>(obj, where, "noise_levels");
  }
  if (obj.contains("dims")) {
    e.dims = get_field<std::vector<std::size_t>>(obj, where, "dims");
  }
  return e;
}

std::size_t native_dim(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kCircles:
    case DatasetKind::kMoons:
      return 2;
    case DatasetKind::kSCurve:
    case DatasetKind::kSwissRoll:
      return 3;
    case DatasetKind::kBlobs:
      break;
  }
  return 0;
}

const std::vector<double>& noise_levels_for(const ExperimentConfig& config,
                                            const DatasetEntry& entry) {
  return entry.noise_levels ? *entry.noise_levels : config.noise_levels;
}

std::vector<std::size_t> dims_for(const ExperimentConfig& config,
                                  const DatasetEntry& entry) {
  if (entry.spec.kind != DatasetKind::kBlobs) {
    return {native_dim(entry.spec.kind)};
  }
  return entry.dims ? *entry.dims : config.dims;
}

// A cell fully resolved to the specs it runs with.
struct CellPlan {
  CellKey key;
  DatasetSpec dataset;
  const TransformSpec* transform = nullptr;
};

std::vector<CellPlan> plan_cells(const ExperimentConfig& config) {
  std::vector<CellPlan> plans;
  for (const DatasetEntry& entry : config.datasets) {
    for (double noise : noise_levels_for(config, entry)) {
      for (std::size_t dim : dims_for(config, entry)) {
        for (const TransformSpec& transform : config.transforms) {
          for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            CellPlan plan;
            plan.dataset = entry.spec;
            plan.dataset.noise = noise;
            plan.dataset.dim = dim;
            plan.dataset.seed = config.base_seed + rep;
            plan.transform = &transform;
            plan.key = {std::string(to_string(entry.spec.kind)), noise, dim,
                        std::string(to_string(transform.kind)), rep};
            plans.push_back(std::move(plan));
          }
        }
      }
    }
  }
  return plans;
}

ResultRow base_row(const CellPlan& plan, const MetricSpec& metric) {
  ResultRow row;
  row.dataset = plan.key.dataset;
  row.noise = plan.key.noise;
  row.dim = plan.key.dim;
  row.transform = plan.key.transform;
  row.metric = metric.name;
  row.mode = metric.mode_tag();
  row.k = metric.k_column();
  row.repetition = plan.key.repetition;
  row.seed = plan.dataset.seed;
  return row;
}

void mark_failed(ResultRow& row, const std::string& message) {
  row.value = std::numeric_limits<double>::quiet_NaN();
  row.inversion_strategy = "error";
  row.error = message.empty() ? "unknown error" : message;
}

MetricReport compute_metric(EmbeddingEvaluator& evaluator,
                            const DataMatrix& embedding,
                            const MetricSpec& metric, std::uint64_t seed) {
  if (metric.name == "ar") return evaluator.average_rank(metric.k);
  if (metric.name == "anr") return evaluator.average_normalized_rank(metric.k);
  if (metric.name == "mrr") return evaluator.mean_reciprocal_rank();
  if (metric.name == "trustworthiness") {
    return evaluator.trustworthiness(metric.k);
  }
  if (metric.name == "continuity") return evaluator.continuity(metric.k);
  if (metric.name == "idpe") {
    return evaluator.idpe(metric.k, metric.mode, metric.include_self);
  }
  if (metric.name == "accuracy") {
    MetricReport r;
    r.metric = "accuracy";
    r.value = logistic_accuracy(embedding, seed);
    r.n = embedding.rows();
    return r;
  }
  throw ContractError("unknown metric '" + metric.name + "'");
}

std::vector<ResultRow> run_cell(const ExperimentConfig& config,
                                const CellPlan& plan) {
  std::vector<ResultRow> rows;
  rows.reserve(config.metrics.size());
  std::optional<DataMatrix> original;
  std::optional<DataMatrix> embedding;
  std::string cell_error;
  try {
    original = generate(plan.dataset).data;
    TransformSpec transform = *plan.transform;
    transform.seed = plan.dataset.seed;
    embedding = apply_transform(*original, transform);
  } catch (const std::exception& e) {
    cell_error = e.what();
  }

  if (!cell_error.empty()) {
    for (const MetricSpec& metric : config.metrics) {
      rows.push_back(base_row(plan, metric));
      mark_failed(rows.back(), cell_error);
    }
    return rows;
  }

  EmbeddingEvaluator evaluator(*original, *embedding, config.inversion);
  for (const MetricSpec& metric : config.metrics) {
    ResultRow row = base_row(plan, metric);
    const auto start = std::chrono::steady_clock::now();
    try {
      const MetricReport report =
          compute_metric(evaluator, *embedding, metric, plan.dataset.seed);
      row.value = report.value;
      row.inversion_strategy = report.inversion_strategy;
    } catch (const std::exception& e) {
      mark_failed(row, e.what());
    }
    if (config.record_timing) {
      row.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T parse_number(std::string_view f, std::string_view source, std::size_t line,
               std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw ParseError(std::string(source) + ":" + std::to_string(line) +
                     ": cannot parse " + std::string(column) + " '" +
                     std::string(f) + "'");
  }
  return value;
}

void check_csv_safe(std::string_view field) {
  if (field.find_first_of(",\n\r") != std::string_view::npos) {
    throw ContractError("field '" + std::string(field) +
                        "' cannot be written to CSV unquoted");
  }
}

}  // namespace

std::string MetricSpec::mode_tag() const {
  if (name != "idpe") return "";
  std::string tag(to_string(mode));
  const bool default_self = mode == IdpeMode::kBox1;
  if (include_self && *include_self != default_self) {
    tag += *include_self ? "_self" : "_noself";
  }
  return tag;
}

std::size_t MetricSpec::k_column() const {
  if (name == "mrr") return 1;
  if (name == "accuracy") return 0;
  return k;
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown_keys(doc, "config",
                      {"datasets", "noise_levels", "dims", "transforms",
                       "metrics", "repetitions", "base_seed", "output_path",
                       "inversion", "record_timing"});
  ExperimentConfig c;
  const json& datasets = doc.at("datasets");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    c.datasets.push_back(parse_dataset(datasets[i], i));
  }
  read_optional(doc, "config", "noise_levels", c.noise_levels);
  read_optional(doc, "config", "dims", c.dims);
  const json& transforms = doc.at("transforms");
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    c.transforms.push_back(parse_transform(transforms[i], i));
  }
  const json& metrics = doc.at("metrics");
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    c.metrics.push_back(parse_metric(metrics[i], i));
  }
  read_optional(doc, "config", "repetitions", c.repetitions);
  read_optional(doc, "config", "base_seed", c.base_seed);
  read_optional(doc, "config", "output_path", c.output_path);
  read_optional(doc, "config", "record_timing", c.record_timing);
  if (doc.contains("inversion")) {
    const json& inv = doc.at("inversion");
    reject_unknown_keys(inv, "inversion",
                        {"fallback", "max_condition", "pinv_cutoff",
                         "ridge_lambda"});
    if (inv.contains("fallback")) {
      c.inversion.fallback =
          parse_fallback(get_field<std::string>(inv, "inversion", "fallback"));
    }
    read_optional(inv, "inversion", "max_condition", c.inversion.max_condition);
    read_optional(inv, "inversion", "pinv_cutoff", c.inversion.pinv_cutoff);
    read_optional(inv, "inversion", "ridge_lambda", c.inversion.ridge_lambda);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw ContractError(path.string() + ": " + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["datasets"] = json::array();
  for (const DatasetEntry& e : c.datasets) {
    json d;
    d["kind"] = to_string(e.spec.kind);
    d["n_samples"] = e.spec.n_samples;
    d["standardize"] = e.spec.standardize;
    if (e.noise_levels) d["noise_levels"] = *e.noise_levels;
    if (e.dims) d["dims"] = *e.dims;
    doc["datasets"].push_back(d);
  }
  doc["noise_levels"] = c.noise_levels;
  doc["dims"] = c.dims;
  doc["transforms"] = json::array();
  for (const TransformSpec& t : c.transforms) {
    json j;
    j["kind"] = to_string(t.kind);
    j["d_out"] = t.d_out;
    if (t.kind == TransformKind::kTsne) {
      j["perplexity"] = t.tsne.perplexity;
      j["iterations"] = t.tsne.iterations;
      j["learning_rate"] = t.tsne.learning_rate;
      j["early_exaggeration"] = t.tsne.early_exaggeration;
      j["exaggeration_iterations"] = t.tsne.exaggeration_iterations;
      j["initial_momentum"] = t.tsne.initial_momentum;
      j["final_momentum"] = t.tsne.final_momentum;
      j["momentum_switch"] = t.tsne.momentum_switch;
      j["init_variance"] = t.tsne.init_variance;
    }
    doc["transforms"].push_back(j);
  }
  doc["metrics"] = json::array();
  for (const MetricSpec& m : c.metrics) {
    json j;
    j["name"] = m.name;
    j["k"] = m.k;
    if (m.name == "idpe") {
      j["mode"] = to_string(m.mode);
      if (m.include_self) j["include_self"] = *m.include_self;
    }
    doc["metrics"].push_back(j);
  }
  doc["repetitions"] = c.repetitions;
  doc["base_seed"] = c.base_seed;
  doc["output_path"] = c.output_path;
  doc["inversion"] = {{"fallback", fallback_name(c.inversion.fallback)},
                      {"max_condition", c.inversion.max_condition},
                      {"pinv_cutoff", c.inversion.pinv_cutoff},
                      {"ridge_lambda", c.inversion.ridge_lambda}};
  doc["record_timing"] = c.record_timing;
  return doc;
}

void validate(const ExperimentConfig& c) {
  if (c.repetitions < 1) throw ContractError("repetitions must be >= 1");
  if (c.datasets.empty()) throw ContractError("datasets must not be empty");
  if (c.transforms.empty()) throw ContractError("transforms must not be empty");
  if (c.metrics.empty()) throw ContractError("metrics must not be empty");

  std::size_t min_n = std::numeric_limits<std::size_t>::max();
  std::set<std::string> dataset_kinds;
  for (const DatasetEntry& e : c.datasets) {
    const std::string kind(to_string(e.spec.kind));
    if (!dataset_kinds.insert(kind).second) {
      throw ContractError("dataset '" + kind + "' is listed twice");
    }
    const auto& noise = noise_levels_for(c, e);
    const auto dims = dims_for(c, e);
    if (noise.empty()) {
      throw ContractError("dataset '" + kind + "' has no noise levels");
    }
    if (dims.empty()) throw ContractError("dataset '" + kind + "' has no dims");
    if (std::set<double>(noise.begin(), noise.end()).size() != noise.size()) {
      throw ContractError("dataset '" + kind + "' repeats a noise level");
    }
    if (std::set<std::size_t>(dims.begin(), dims.end()).size() != dims.size()) {
      throw ContractError("dataset '" + kind + "' repeats a dim");
    }
    for (double level : noise) {
      for (std::size_t dim : dims) {
        DatasetSpec spec = e.spec;
        spec.noise = level;
        spec.dim = dim;
        embedlens::validate(spec);
        for (const TransformSpec& t : c.transforms) {
          if (t.kind == TransformKind::kPca &&
              (t.d_out < 1 || t.d_out > std::min(dim, spec.n_samples))) {
            throw ContractError("pca d_out=" + std::to_string(t.d_out) +
                                " exceeds the " + std::to_string(dim) +
                                "-dim '" + kind + "' data");
          }
        }
      }
    }
    min_n = std::min(min_n, e.spec.n_samples);
  }

  std::set<std::string> transform_kinds;
  for (const TransformSpec& t : c.transforms) {
    const std::string kind(to_string(t.kind));
    if (!transform_kinds.insert(kind).second) {
      throw ContractError("transform '" + kind + "' is listed twice");
    }
    if (t.d_out < 1) throw ContractError(kind + " d_out must be >= 1");
    if (t.kind == TransformKind::kTsne &&
        !(t.tsne.perplexity < static_cast<double>(min_n - 1) / 3.0)) {
      throw ContractError("tsne perplexity must be below (n-1)/3 for n=" +
                          std::to_string(min_n));
    }
  }

  std::set<std::tuple<std::string, std::string, std::size_t>> metric_keys;
  for (const MetricSpec& m : c.metrics) {
    if (!metric_keys.emplace(m.name, m.mode_tag(), m.k_column()).second) {
      throw ContractError("metric '" + m.name + "' (mode '" + m.mode_tag() +
                          "', k=" + std::to_string(m.k_column()) +
                          ") is listed twice");
    }
    const bool uses_k = m.name != "mrr" && m.name != "accuracy";
    if (!uses_k) continue;
    const bool self =
        m.name == "idpe" && m.include_self.value_or(m.mode == IdpeMode::kBox1);
    const std::size_t max_k = self ? min_n : min_n - 1;
    if (m.k < 1 || m.k > max_k) {
      throw ContractError(m.name + ": k=" + std::to_string(m.k) +
                          " out of range [1, " + std::to_string(max_k) +
                          "] for n=" + std::to_string(min_n));
    }
    if ((m.name == "trustworthiness" || m.name == "continuity") &&
        2 * min_n <= 3 * m.k + 1) {
      throw ContractError(m.name + ": k=" + std::to_string(m.k) +
                          " makes 2N-3k-1 nonpositive for N=" +
                          std::to_string(min_n));
    }
  }
}

std::vector<CellKey> enumerate_cells(const ExperimentConfig& config) {
  std::vector<CellKey> keys;
  for (const CellPlan& plan : plan_cells(config)) keys.push_back(plan.key);
  return keys;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::size_t jobs) {
  validate(config);
  const std::vector<CellPlan> plans = plan_cells(config);
  std::vector<std::vector<ResultRow>> per_cell(plans.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < plans.size(); i = next++) {
      per_cell[i] = run_cell(config, plans[i]);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, plans.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  rows.reserve(plans.size() * config.metrics.size());
  for (auto& cell : per_cell) {
    for (auto& row : cell) rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    for (std::string_view f :
         {std::string_view(r.dataset), std::string_view(r.transform),
          std::string_view(r.metric), std::string_view(r.mode),
          std::string_view(r.inversion_strategy)}) {
      check_csv_safe(f);
    }
    out += r.dataset + ',' + format_real(r.noise) + ',' +
           std::to_string(r.dim) + ',' + r.transform + ',' + r.metric + ',' +
           r.mode + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.repetition) + ',' + std::to_string(r.seed) + ',' +
           format_real(r.value) + ',' + r.inversion_strategy + ',' +
           format_real(r.wall_time_ms) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_results_csv(std::string_view text,
                                         std::string_view source) {
  std::vector<ResultRow> rows;
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kResultsHeader) {
        throw ParseError(std::string(source) + ":1: unexpected results header");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": expected 12 fields, got " + std::to_string(f.size()));
    }
    ResultRow r;
    r.dataset = f[0];
    r.noise = parse_number<double>(f[1], source, line_no, "noise");
    r.dim = parse_number<std::size_t>(f[2], source, line_no, "dim");
    r.transform = f[3];
    r.metric = f[4];
    r.mode = f[5];
    r.k = parse_number<std::size_t>(f[6], source, line_no, "k");
    r.repetition =
        parse_number<std::size_t>(f[7], source, line_no, "repetition");
    r.seed = parse_number<std::uint64_t>(f[8], source, line_no, "seed");
    r.value = parse_number<double>(f[9], source, line_no, "value");
    r.inversion_strategy = f[10];
    r.wall_time_ms =
        parse_number<double>(f[11], source, line_no, "wall_time_ms");
    rows.push_back(std::move(r));
  }
  if (!saw_header) {
    throw ParseError(std::string(source) + ":1: empty results file");
  }
  return rows;
}

json results_to_json(const std::vector<ResultRow>& rows,
                     const ExperimentConfig& config) {
  json doc;
  doc["config"] = to_json(config);
  doc["rows"] = json::array();
  doc["errors"] = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    json j;
    j["dataset"] = r.dataset;
    j["noise"] = r.noise;
    j["dim"] = r.dim;
    j["transform"] = r.transform;
    j["metric"] = r.metric;
    j["mode"] = r.mode;
    j["k"] = r.k;
    j["repetition"] = r.repetition;
    j["seed"] = r.seed;
    j["value"] = std::isnan(r.value) ? json(nullptr) : json(r.value);
    j["inversion_strategy"] = r.inversion_strategy;
    j["wall_time_ms"] = r.wall_time_ms;
    doc["rows"].push_back(std::move(j));
    if (r.failed()) {
      doc["errors"].push_back({{"row", i}, {"message", r.error}});
    }
  }
  doc["failed_cells"] = count_failed_cells(rows);
  return doc;
}

void write_results(const std::vector<ResultRow>& rows,
                   const std::filesystem::path& path, ResultFormat format,
                   const ExperimentConfig& config) {
  if (rows.empty()) throw ContractError("write_results: no rows to write");
  if (format == ResultFormat::kCsv) {
    write_text_file(path, format_results_csv(rows));
  } else {
    write_text_file(path, results_to_json(rows, config).dump(2) + "\n");
  }
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, double, std::size_t, std::string,
                         std::string, std::string, std::size_t>;
  std::map<Key, std::size_t> slot;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> values;
  for (const ResultRow& r : rows) {
    const Key key{r.dataset, r.noise, r.dim, r.transform, r.metric, r.mode, r.k};
    auto [it, inserted] = slot.emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.dataset = r.dataset;
      s.noise = r.noise;
      s.dim = r.dim;
      s.transform = r.transform;
      s.metric = r.metric;
      s.mode = r.mode;
      s.k = r.k;
      out.push_back(std::move(s));
      values.emplace_back();
    }
    SummaryRow& s = out[it->second];
    if (r.failed() || std::isnan(r.value)) {
      ++s.failed;
    } else {
      values[it->second].push_back(r.value);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    SummaryRow& s = out[i];
    s.count = v.size();
    if (v.empty()) {
      s.mean = s.std = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1))
                         : 0.0;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
  }
  return out;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "dataset,noise,dim,transform,metric,mode,k,count,failed,mean,std,min,"
      "max\n";
  for (const SummaryRow& s : rows) {
    out += s.dataset + ',' + format_real(s.noise) + ',' +
           std::to_string(s.dim) + ',' + s.transform + ',' + s.metric + ',' +
           s.mode + ',' + std::to_string(s.k) + ',' + std::to_string(s.count) +
           ',' + std::to_string(s.failed) + ',' + format_real(s.mean) + ',' +
           format_real(s.std) + ',' + format_real(s.min) + ',' +
           format_real(s.max) + '\n';
  }
  return out;
}

std::size_t count_failed_cells(const std::vector<ResultRow>& rows) {
  std::set<std::tuple<std::string, double, std::size_t, std::string,
                      std::size_t>>
      failed;
  for (const ResultRow& r : rows) {
    if (r.failed()) {
      failed.emplace(r.dataset, r.noise, r.dim, r.transform, r.repetition);
    }
  }
  return failed.size();
}

std::vector<MetricSpec> default_metrics(std::size_t k, IdpeMode mode) {
  std::vector<MetricSpec> metrics;
  for (const char* name :
       {"ar", "anr", "mrr", "trustworthiness", "continuity", "idpe"}) {
    MetricSpec m;
    m.name = name;
    m.k = k;
    m.mode = mode;
    metrics.push_back(std::move(m));
  }
  return metrics;
}

std::vector<MetricReport> evaluate_matrices(const DataMatrix& original,
                                            const DataMatrix& embedding,
                                            const EvaluateOptions& options) {
  const std::vector<MetricSpec> metrics =
      options.metrics.empty() ? default_metrics() : options.metrics;
  EmbeddingEvaluator evaluator(original, embedding, options.inversion);
  std::vector<MetricReport> reports;
  for (const MetricSpec& m : metrics) {
    if (m.name == "accuracy" && !embedding.has_labels()) {
      if (!original.has_labels()) {
        throw ContractError(
            "accuracy requested but neither file has a label column");
      }
      const DataMatrix labeled = embedding.with_labels(
          std::vector<int>(original.labels().begin(), original.labels().end()));
      reports.push_back(compute_metric(evaluator, labeled, m, options.seed));
      continue;
    }
    reports.push_back(compute_metric(evaluator, embedding, m, options.seed));
  }
  return reports;
}

std::vector<MetricReport> evaluate_pair(const std::filesystem::path& original,
                                        const std::filesystem::path& embedding,
                                        const EvaluateOptions& options) {
  const DataMatrix x = read_matrix_csv(original);
  const DataMatrix z = read_matrix_csv(embedding);
  if (x.rows() != z.rows()) {
    throw ContractError("row count mismatch: " + original.string() + " has " +
                        std::to_string(x.rows()) + " rows, " +
                        embedding.string() + " has " +
                        std::to_string(z.rows()));
  }
  return evaluate_matrices(x, z, options);
}

json to_json(const MetricReport& report) {
  json j;
  j["metric"] = report.metric;
  j["value"] = report.value;
  j["k"] = report.k;
  j["mode"] = report.mode;
  j["n"] = report.n;
  j["inversion_strategy"] = report.inversion_strategy;
  j["include_self"] = report.include_self;
  return j;
}

}  // namespace embedlens
