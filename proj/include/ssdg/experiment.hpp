// Copyright 2026 The ssdg Authors.
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

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ssdg/domain_synth.hpp"
#include "ssdg/metrics.hpp"
#include "ssdg/trainer.hpp"

namespace ssdg {

struct DataConfig {
  /// When set, the dataset is read from this CSV and the geometry is ignored.
  std::optional<std::string> csv;
  GeometryConfig geometry;
};

struct ExperimentConfig {
  DataConfig data;
  std::vector<int> sources{0, 1, 2};
  int target = 3;
  /// source_domains inside is overwritten from `sources`.
  TrainConfig train;
  std::vector<std::uint64_t> seeds{1};
  ThresholdPolicy threshold;
  /// Empty: nothing is written to disk.
  std::string out_dir;
};

/// Throws ContractError for an invalid domain partition or training setup.
void validate(const ExperimentConfig& c);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// Dataset description for gen-data: either an explicit
/// {dim, real_center, shift_real, sep_fake, domains: [{real_mean, real_scale,
/// fake_means, fake_scale}], per_domain_counts} or {geometry: {...}}, the
/// latter drawn with `seed`.
DatasetSpec dataset_spec_from_json(const nlohmann::json& j, std::uint64_t seed);

/// Directory name of a mode + ablation combination: "ssdg", "bdg",
/// "ssdg-no-triplet", "ssdg-no-ssad-no-norm", ...
std::string variant_label(Mode mode, const Components& c);

/// Dataset for one seed: the CSV when configured, otherwise a fresh synthetic
/// world drawn from the geometry.
Dataset make_dataset(const DataConfig& data, std::uint64_t seed);

struct RunResult {
  std::uint64_t seed = 0;
  std::string variant;
  bool ok = false;
  std::string error;
  EvalReport report;
  /// Cross-domain centroid spreads of source-domain embeddings.
  double real_spread = 0.0;
  double fake_spread = 0.0;
  std::string history_path;
  std::string checkpoint_path;
  ModelParams params;
};

struct VariantSummary {
  std::string variant;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double median_auc = 0.0;
  double mean_auc = 0.0;
  double median_hter = 0.0;
  double mean_hter = 0.0;
};

/// Trains and evaluates one model per seed (seeds run in parallel, each with
/// its own state). A failing seed is reported in its RunResult and does not
/// stop the others. When out_dir is set, writes per seed
/// <out>/<variant>/<seed>/{metrics.txt, roc.csv, history.csv, embeddings.csv,
/// checkpoint.json, checkpoint.bin} and <out>/<variant>/summary.csv.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

VariantSummary summarize(const std::vector<RunResult>& runs);
void write_summary_csv(const std::vector<VariantSummary>& rows, std::ostream& os);

double median(std::vector<double> v);

/// Scores of the target-domain samples.
ScoredSet score_domain(const ModelParams& params, const Dataset& ds, int domain);

/// CSV e0..e{m-1},cls,domain,split with split = source | target.
void dump_embeddings(const ModelParams& params, const Dataset& ds, const std::vector<int>& sources,
                     const std::string& path);

/// `<stem>.json` manifest (model config + name/shape/offset per tensor) and
/// `<stem>.bin` little-endian doubles. Returns the manifest path.
std::string save_checkpoint(const ModelParams& params, const std::string& stem);
/// Takes the manifest path.
ModelParams load_checkpoint(const std::string& manifest_path);

}  // namespace ssdg
