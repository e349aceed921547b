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

// Command-line front end: generate, transform, evaluate, sweep, summarize.
//
// Exit codes: 0 on success, 2 when a sweep finished with failed cells,
// 1 on any fatal configuration or I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "embedlens/datasets.h"
#include "embedlens/error.h"
#include "embedlens/experiment.h"
#include "embedlens/matrix_csv.h"
#include "embedlens/metrics.h"
#include "embedlens/transforms.h"
#include "embedlens/tsne.h"

namespace {

using embedlens::ContractError;
using nlohmann::json;

std::size_t default_jobs() {
  if (const char* env = std::getenv("EMBEDLENS_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid EMBEDLENS_JOBS='" << env << "'\n";
  }
  return 1;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    embedlens::write_text_file(out, text);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct GenerateArgs {
  std::string config;
  std::string kind = "blobs";
  std::size_t n = 500;
  double noise = 1.0;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  bool standardize = false;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  embedlens::DatasetSpec spec;
  spec.kind = embedlens::parse_dataset_kind(a.kind);
  spec.n_samples = a.n;
  spec.noise = a.noise;
  spec.dim = a.dim;
  spec.seed = a.seed;
  spec.standardize = a.standardize;
  if (!a.config.empty()) {
    const json doc = json::parse(embedlens::read_text_file(a.config));
    if (doc.contains("kind")) {
      spec.kind = embedlens::parse_dataset_kind(doc.at("kind").get<std::string>());
    }
    if (doc.contains("n_samples")) spec.n_samples = doc.at("n_samples");
    if (doc.contains("noise")) spec.noise = doc.at("noise");
    if (doc.contains("dim")) spec.dim = doc.at("dim");
    if (doc.contains("seed")) spec.seed = doc.at("seed");
    if (doc.contains("standardize")) spec.standardize = doc.at("standardize");
  }
  const embedlens::Dataset ds = embedlens::generate(spec);
  if (ds.center_redraws > 0) {
    std::cerr << "blob centers re-drawn " << ds.center_redraws << " time(s)\n";
  }
  emit(embedlens::format_matrix_csv(ds.data), a.out);
  return 0;
}

struct TransformArgs {
  std::string in;
  std::string kind = "pca";
  std::size_t d_out = 2;
  std::uint64_t seed = 0;
  embedlens::TsneParams tsne;
  std::string out;
};

int run_transform(const TransformArgs& a) {
  const embedlens::DataMatrix x = embedlens::read_matrix_csv(a.in);
  embedlens::TransformSpec spec;
  spec.kind = embedlens::parse_transform_kind(a.kind);
  spec.d_out = a.d_out;
  spec.seed = a.seed;
  spec.tsne = a.tsne;
  emit(embedlens::format_matrix_csv(embedlens::apply_transform(x, spec)), a.out);
  return 0;
}

struct EvaluateArgs {
  std::string original;
  std::string embedding;
  std::size_t k = embedlens::kDefaultK;
  std::string mode = "box1";
  std::optional<bool> include_self;
  std::string metrics;
  std::string inversion = "pseudo_inverse";
  double ridge_lambda = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
  embedlens::EvaluateOptions options;
  options.seed = a.seed;
  if (a.inversion == "pseudo_inverse") {
    options.inversion = embedlens::InversionPolicy::pseudo_inverse();
  } else if (a.inversion == "ridge") {
    options.inversion = embedlens::InversionPolicy::ridge(a.ridge_lambda);
  } else if (a.inversion == "exact") {
    options.inversion = embedlens::InversionPolicy::exact();
  } else {
    throw ContractError("--inversion must be pseudo_inverse, ridge or exact");
  }
  const embedlens::IdpeMode mode = embedlens::parse_idpe_mode(a.mode);
  const std::vector<std::string> names =
      a.metrics.empty() ? std::vector<std::string>{"ar", "anr", "mrr",
                                                   "trustworthiness",
                                                   "continuity", "idpe"}
                        : split_list(a.metrics);
  for (const std::string& name : names) {
    embedlens::MetricSpec m;
    m.name = name;
    m.k = a.k;
    m.mode = mode;
    m.include_self = a.include_self;
    options.metrics.push_back(m);
  }
  const auto reports =
      embedlens::evaluate_pair(a.original, a.embedding, options);
  json doc = json::array();
  for (const auto& r : reports) doc.push_back(embedlens::to_json(r));
  emit(doc.dump(2) + "\n", a.out);
  return 0;
}

struct SweepArgs {
  std::string config;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::string summary;
};

int run_sweep(const SweepArgs& a) {
  embedlens::ExperimentConfig config = embedlens::load_config(a.config);
  if (a.seed) config.base_seed = *a.seed;
  if (!a.out.empty()) config.output_path = a.out;
  if (config.output_path.empty()) {
    throw ContractError("no output path: set output_path or pass --out");
  }
  if (a.format != "csv" && a.format != "json") {
    throw ContractError("--format must be csv or json");
  }
  const embedlens::ResultFormat format =
      a.format == "json" ? embedlens::ResultFormat::kJson
                         : embedlens::ResultFormat::kCsv;
  const std::size_t jobs = a.jobs.value_or(default_jobs());
  const auto rows = embedlens::run_experiment(config, jobs);
  embedlens::write_results(rows, config.output_path, format, config);
  if (!a.summary.empty()) {
    embedlens::write_text_file(
        a.summary,
        embedlens::format_summary_csv(embedlens::summarize(rows)));
  }
  const std::size_t cells = embedlens::enumerate_cells(config).size();
  const std::size_t failed = embedlens::count_failed_cells(rows);
  std::cerr << "cells: " << cells << ", rows: " << rows.size()
            << ", failed cells: " << failed << "\n";
  for (const auto& r : rows) {
    if (r.failed()) {
      std::cerr << "  " << r.dataset << " noise=" << r.noise
                << " dim=" << r.dim << " " << r.transform
                << " rep=" << r.repetition << " " << r.metric << ": "
                << r.error << "\n";
    }
  }
  return failed > 0 ? 2 : 0;
}

struct SummarizeArgs {
  std::string in;
  std::string out;
};

int run_summarize(const SummarizeArgs& a) {
  const auto rows = embedlens::parse_results_csv(
      embedlens::read_text_file(a.in), a.in);
  emit(embedlens::format_summary_csv(embedlens::summarize(rows)), a.out);
  const std::size_t failed = embedlens::count_failed_cells(rows);
  std::cerr << "failed cells: " << failed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedlens: embedding-quality metrics and experiment sweeps"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--config", gen.config, "Dataset spec JSON");
  generate->add_option("--kind", gen.kind,
                       "blobs, circles, moons, s_curve or swiss_roll");
  generate->add_option("--n", gen.n, "Sample count");
  generate->add_option("--noise", gen.noise, "Cluster std / additive noise");
  generate->add_option("--dim", gen.dim, "Feature count (blobs)");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_flag("--standardize", gen.standardize,
                     "Z-score the columns after generation");
  generate->add_option("--out", gen.out, "Output matrix CSV (default stdout)");

  TransformArgs tr;
  auto* transform =
      app.add_subcommand("transform", "Embed a matrix CSV with pca/grp/tsne");
  transform->add_option("--in", tr.in, "Input matrix CSV")->required();
  transform->add_option("--kind", tr.kind, "pca, grp or tsne");
  transform->add_option("--d-out", tr.d_out, "Output dimension");
  transform->add_option("--seed", tr.seed, "RNG seed (grp, tsne)");
  transform->add_option("--perplexity", tr.tsne.perplexity, "t-SNE perplexity");
  transform->add_option("--iterations", tr.tsne.iterations,
                        "t-SNE iterations");
  transform->add_option("--out", tr.out, "Output matrix CSV (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score an (original, embedding) pair of matrix CSVs");
  evaluate->add_option("--original", ev.original, "Original matrix CSV")
      ->required();
  evaluate->add_option("--embedding", ev.embedding, "Embedding matrix CSV")
      ->required();
  evaluate->add_option("--k", ev.k, "Neighbor count");
  evaluate->add_option("--mode", ev.mode, "IDPE mode: box1 or consistent");
  evaluate->add_option("--include-self", ev.include_self,
                       "IDPE self-match inclusion (default per mode)");
  evaluate->add_option("--metrics", ev.metrics,
                       "Comma list of ar,anr,mrr,trustworthiness,continuity,"
                       "idpe,accuracy");
  evaluate->add_option("--inversion", ev.inversion,
                       "pseudo_inverse, ridge or exact");
  evaluate->add_option("--ridge-lambda", ev.ridge_lambda, "Ridge strength");
  evaluate->add_option("--seed", ev.seed, "Seed for the accuracy probe split");
  evaluate->add_option("--out", ev.out, "Output JSON (default stdout)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment config");
  sweep->add_option("--config", sw.config, "Experiment config JSON")
      ->required();
  sweep->add_option("--jobs", sw.jobs,
                    "Worker threads (default $EMBEDLENS_JOBS or 1)");
  sweep->add_option("--seed", sw.seed, "Override base_seed");
  sweep->add_option("--out", sw.out, "Override output_path");
  sweep->add_option("--format", sw.format, "csv or json");
  sweep->add_option("--summary", sw.summary, "Also write a per-cell summary");

  SummarizeArgs su;
  auto* summarize = app.add_subcommand(
      "summarize", "Per-cell mean/std/min/max over repetitions");
  summarize->add_option("--in", su.in, "Results CSV")->required();
  summarize->add_option("--out", su.out, "Summary CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (transform->parsed()) return run_transform(tr);
    if (evaluate->parsed()) return run_evaluate(ev);
    if (sweep->parsed()) return run_sweep(sw);
    if (summarize->parsed()) return run_summarize(su);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
