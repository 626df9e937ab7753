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
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssdg/domain_synth.hpp"
#include "ssdg/losses.hpp"
#include "ssdg/model.hpp"

namespace ssdg {

/// ssdg: real-only adversarial alignment + asymmetric (N+1)-category triplet.
/// bdg: both classes aligned + two-category triplet.
enum class Mode { kSsdg, kBdg };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// Ablation switches. All on is the full method.
struct Components {
  bool ssad = true;
  bool triplet = true;
  bool norm = true;
};

struct TrainConfig {
  Mode mode = Mode::kSsdg;
  double lr = 0.003;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t total_iters = 2000;
  std::size_t batch_size = 24;
  LossWeights weights;
  std::uint64_t seed = 1;
  /// input_dim, n_domains and normalize are filled in by train().
  ModelConfig model;
  Mining mining = Mining::kBatchHard;
  Components components;
  std::vector<int> source_domains;
};

/// Checks ranges; throws ContractError.
void validate(const TrainConfig& c);

struct SgdConfig {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
};

/// v <- momentum v + (grad + weight_decay param); param <- param - lr v.
/// Throws NonFiniteLossError on a non-finite gradient entry.
void sgd_step(std::span<double> param, std::span<const double> grad, std::span<double> velocity,
              const SgdConfig& cfg);

/// One velocity buffer per parameter, zero-initialized.
class OptimizerState {
 public:
  explicit OptimizerState(const ModelParams& params);

  /// Applies sgd_step to every parameter; weight decay only where
  /// Parameter::decay is set.
  void step(ModelParams& params, std::span<const Tensor> grads, double lr, double momentum,
            double weight_decay);

  const std::vector<Tensor>& velocity() const { return velocity_; }

 private:
  std::vector<Tensor> velocity_;
};

struct IterRecord {
  std::size_t iter = 0;
  double lambda = 0.0;
  double l_cls = 0.0;
  double l_ada = 0.0;
  double l_astrip = 0.0;
  double l_total = 0.0;
};

struct TrainHistory {
  std::vector<IterRecord> records;
};

/// CSV with header iter,lambda,l_cls,l_ada,l_astrip,l_total.
void write_history_csv(const TrainHistory& h, std::ostream& os);

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Training hit a non-finite loss or gradient. Carries the history so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, TrainHistory history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const TrainHistory& history() const { return history_; }

 private:
  TrainHistory history_;
};

/// The per-step computation graph. `parts.ada` / `parts.trip` are empty when
/// the component is switched off.
struct Objective {
  GeneratorOutput features;
  Var logits;
  LossParts parts;
  Var total;
};

/// Builds every loss term for one batch of source samples.
Objective build_objective(const BoundModel& m, Var x, std::span<const Sample> batch,
                          const TrainConfig& cfg, double lambda);

/// The model configuration train() would use for this dataset.
ModelConfig resolve_model_config(const TrainConfig& cfg, const Dataset& ds);

/// Called after each optimizer step (and weight projection).
using StepObserver = std::function<void(std::size_t iter, const ModelParams&)>;

/// End-to-end training: balanced batch, forward, composite loss, backward,
/// SGD, classifier projection. Deterministic in cfg.seed.
TrainResult train(const TrainConfig& cfg, const Dataset& ds, const StepObserver& observer = {});

/// train() with mode forced to the symmetric baseline.
TrainResult train_bdg(TrainConfig cfg, const Dataset& ds, const StepObserver& observer = {});

}  // namespace ssdg
