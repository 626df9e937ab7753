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

// ssdg: train / evaluate single-side domain generalization models on
// synthetic multi-domain data.
//
//   ssdg run --config exp.json [--seed N] [--mode ssdg|bdg] [--no-ssad]
//            [--no-triplet] [--no-norm] [--out DIR] [training overrides]
//   ssdg eval --checkpoint run/ssdg/1/checkpoint.json --data data.csv --target 3
//   ssdg gen-data --spec data_spec.json --seed 7 --out data.csv

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "ssdg/experiment.hpp"
#include "ssdg/io.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> mode;
  bool no_ssad = false;
  bool no_triplet = false;
  bool no_norm = false;
  std::optional<std::string> out;
  std::optional<double> lr, momentum, weight_decay, lambda1, lambda2, alpha, scale;
  std::optional<std::size_t> iters, batch_size;
  std::optional<std::string> mining, threshold, data;
};

struct EvalOptions {
  std::string checkpoint;
  std::string data;
  int target = 0;
  std::string threshold = "eer-on-test";
  std::optional<std::string> out;
};

struct GenOptions {
  std::string spec;
  std::uint64_t seed = 0;
  std::string out;
};

int do_run(const RunOptions& o) {
  ssdg::ExperimentConfig c = ssdg::load_config(o.config);
  // Flags win over the file.
  if (o.seed) c.seeds = {*o.seed};
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.mode) c.train.mode = ssdg::parse_mode(*o.mode);
  if (o.no_ssad) c.train.components.ssad = false;
  if (o.no_triplet) c.train.components.triplet = false;
  if (o.no_norm) c.train.components.norm = false;
  if (o.out) c.out_dir = *o.out;
  if (o.lr) c.train.lr = *o.lr;
  if (o.momentum) c.train.momentum = *o.momentum;
  if (o.weight_decay) c.train.weight_decay = *o.weight_decay;
  if (o.lambda1) c.train.weights.lambda1 = *o.lambda1;
  if (o.lambda2) c.train.weights.lambda2 = *o.lambda2;
  if (o.alpha) c.train.weights.alpha = *o.alpha;
  if (o.scale) c.train.model.scale = *o.scale;
  if (o.iters) c.train.total_iters = *o.iters;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.mining) c.train.mining = ssdg::parse_mining(*o.mining);
  if (o.threshold) c.threshold = ssdg::parse_threshold_policy(*o.threshold);
  if (o.data) c.data.csv = *o.data;

  const auto results = ssdg::run_experiment(c);
  bool all_ok = true;
  for (const auto& r : results) {
    if (!r.ok) {
      all_ok = false;
      std::cerr << "seed " << r.seed << ": FAILED: " << r.error << '\n';
      continue;
    }
    std::cout << r.variant << " seed=" << r.seed << " auc=" << ssdg::io::format_double(r.report.auc)
              << " hter=" << ssdg::io::format_double(r.report.hter)
              << " real_spread=" << ssdg::io::format_double(r.real_spread)
              << " fake_spread=" << ssdg::io::format_double(r.fake_spread) << '\n';
  }
  ssdg::write_summary_csv({ssdg::summarize(results)}, std::cout);
  return all_ok ? 0 : 1;
}

int do_eval(const EvalOptions& o) {
  const ssdg::ModelParams params = ssdg::load_checkpoint(o.checkpoint);
  const ssdg::Dataset ds = ssdg::read_csv(o.data);
  if (ds.dim != params.config.input_dim) {
    throw ssdg::ContractError("data has " + std::to_string(ds.dim) +
                              " features but the checkpoint expects " +
                              std::to_string(params.config.input_dim));
  }
  const auto policy = ssdg::parse_threshold_policy(o.threshold);
  const ssdg::EvalReport report = ssdg::evaluate(ssdg::score_domain(params, ds, o.target), policy);
  std::ostringstream metrics;
  ssdg::write_report(report, policy, metrics);
  std::cout << metrics.str();
  if (o.out) {
    const std::filesystem::path dir(*o.out);
    ssdg::io::write_text_file((dir / "metrics.txt").string(), metrics.str());
    std::ostringstream roc;
    ssdg::write_roc_csv(report.roc, roc);
    ssdg::io::write_text_file((dir / "roc.csv").string(), roc.str());
  }
  return 0;
}

int do_gen(const GenOptions& o) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ssdg::io::read_text_file(o.spec));
  } catch (const nlohmann::json::parse_error& e) {
    throw ssdg::ContractError("spec " + o.spec + ": " + e.what());
  }
  const ssdg::Dataset ds = ssdg::generate(ssdg::dataset_spec_from_json(j, o.seed), o.seed);
  ssdg::write_csv(ds, o.out);
  std::cout << "wrote " << ds.samples.size() << " samples (" << ds.n_domains << " domains, dim "
            << ds.dim << ") to " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-side domain generalization on synthetic multi-domain data"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd =
      app.add_subcommand("run", "Train and evaluate one mode over the configured seeds");
  run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", run.seed, "Run a single seed");
  run_cmd->add_option("--seeds", run.seeds, "Run these seeds")->delimiter(',');
  run_cmd->add_option("--mode", run.mode, "ssdg | bdg");
  run_cmd->add_flag("--no-ssad", run.no_ssad, "Drop the adversarial term");
  run_cmd->add_flag("--no-triplet", run.no_triplet, "Drop the triplet term");
  run_cmd->add_flag("--no-norm", run.no_norm, "No feature/weight normalization");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--data", run.data, "Dataset CSV instead of the synthetic geometry");
  run_cmd->add_option("--lr", run.lr);
  run_cmd->add_option("--momentum", run.momentum);
  run_cmd->add_option("--weight-decay", run.weight_decay);
  run_cmd->add_option("--iters", run.iters, "Total training iterations");
  run_cmd->add_option("--batch-size", run.batch_size);
  run_cmd->add_option("--lambda1", run.lambda1, "Adversarial loss weight");
  run_cmd->add_option("--lambda2", run.lambda2, "Triplet loss weight");
  run_cmd->add_option("--alpha", run.alpha, "Triplet margin");
  run_cmd->add_option("--scale", run.scale, "Logit scale after normalization");
  run_cmd->add_option("--mining", run.mining, "batch-hard | all");
  run_cmd->add_option("--threshold", run.threshold, "eer-on-test | fixed:<t>");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a held-out domain with a saved checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "checkpoint.json manifest")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset CSV")->required();
  eval_cmd->add_option("--target", ev.target, "Domain to evaluate")->required();
  eval_cmd->add_option("--threshold", ev.threshold, "eer-on-test | fixed:<t>");
  eval_cmd->add_option("--out", ev.out, "Also write metrics.txt and roc.csv here");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset CSV");
  gen_cmd->add_option("--spec", gen.spec, "Dataset spec (JSON)")->required();
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run);
    if (*eval_cmd) return do_eval(ev);
    if (*gen_cmd) return do_gen(gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
