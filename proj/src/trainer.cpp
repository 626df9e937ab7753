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

#include "ssdg/trainer.hpp"

#include <cmath>
#include <ostream>

#include "ssdg/io.hpp"

namespace ssdg {

std::string to_string(Mode m) { return m == Mode::kBdg ? "bdg" : "ssdg"; }

Mode parse_mode(const std::string& s) {
  if (s == "ssdg") return Mode::kSsdg;
  if (s == "bdg") return Mode::kBdg;
  throw ContractError("unknown mode '" + s + "' (expected ssdg | bdg)");
}

void validate(const TrainConfig& c) {
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) throw ContractError("lr must be positive");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ContractError("momentum must be in [0, 1)");
  if (!(c.weight_decay >= 0.0) || !std::isfinite(c.weight_decay)) {
    throw ContractError("weight_decay must be non-negative");
  }
  validate(c.weights);
  if (c.source_domains.empty()) throw ContractError("no source domains configured");
  const std::size_t groups = 2 * c.source_domains.size();
  if (c.batch_size == 0 || c.batch_size % groups != 0) {
    throw ContractError("batch_size must be a positive multiple of 2 * N = " +
                        std::to_string(groups));
  }
  if (c.components.ssad && c.source_domains.size() < 2) {
    throw ContractError("adversarial training needs at least two source domains");
  }
}

void sgd_step(std::span<double> param, std::span<const double> grad, std::span<double> velocity,
              const SgdConfig& cfg) {
  if (param.size() != grad.size() || param.size() != velocity.size()) {
    throw ShapeError("sgd_step: parameter, gradient and velocity sizes differ");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw NonFiniteLossError("non-finite gradient");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = cfg.momentum * velocity[i] + (grad[i] + cfg.weight_decay * param[i]);
    param[i] -= cfg.lr * velocity[i];
  }
}

OptimizerState::OptimizerState(const ModelParams& params) {
  for (const Parameter* p : params.all()) velocity_.push_back(Tensor::zeros_like(p->value));
}

void OptimizerState::step(ModelParams& params, std::span<const Tensor> grads, double lr,
                          double momentum, double weight_decay) {
  const auto all = params.all();
  if (grads.size() != all.size()) throw ShapeError("optimizer: one gradient per parameter");
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (grads[i].shape() != all[i]->value.shape()) {
      throw ShapeError("optimizer: gradient shape mismatch for " + all[i]->name);
    }
    const SgdConfig cfg{lr, momentum, all[i]->decay ? weight_decay : 0.0};
    sgd_step(all[i]->value.data(), grads[i].data(), velocity_[i].data(), cfg);
  }
}

void write_history_csv(const TrainHistory& h, std::ostream& os) {
  os << "iter,lambda,l_cls,l_ada,l_astrip,l_total\n";
  for (const IterRecord& r : h.records) {
    os << r.iter << ',' << io::format_double(r.lambda) << ',' << io::format_double(r.l_cls) << ','
       << io::format_double(r.l_ada) << ',' << io::format_double(r.l_astrip) << ','
       << io::format_double(r.l_total) << '\n';
  }
}

Objective build_objective(const BoundModel& m, Var x, std::span<const Sample> batch,
                          const TrainConfig& cfg, double lambda) {
  Objective obj;
  obj.features = forward_generator(m, x);
  obj.logits = forward_classifier(m, obj.features.embedding);

  std::vector<int> cls_labels;
  std::vector<Cls> cls;
  for (const Sample& s : batch) {
    cls_labels.push_back(to_int(s.cls));
    cls.push_back(s.cls);
  }
  obj.parts.cls = classification_loss(obj.logits, cls_labels);

  if (cfg.components.ssad) {
    const auto domains = domain_ordinals(batch, cfg.source_domains);
    obj.parts.ada =
        cfg.mode == Mode::kSsdg
            ? single_side_adversarial_loss(m, obj.features.normalized, cls, domains, lambda)
            : symmetric_adversarial_loss(m, obj.features.normalized, domains, lambda);
  }
  if (cfg.components.triplet) {
    const auto labels = cfg.mode == Mode::kSsdg ? asymmetric_relabel(batch, cfg.source_domains)
                                                : binary_relabel(batch);
    obj.parts.trip =
        asymmetric_triplet_loss(obj.features.normalized, labels, cfg.weights.alpha, cfg.mining);
  }
  obj.total = total_loss(obj.parts, cfg.weights);
  return obj;
}

ModelConfig resolve_model_config(const TrainConfig& cfg, const Dataset& ds) {
  ModelConfig mc = cfg.model;
  mc.input_dim = ds.dim;
  mc.n_domains = cfg.source_domains.size();
  mc.normalize = cfg.components.norm;
  return mc;
}

TrainResult train(const TrainConfig& cfg, const Dataset& ds, const StepObserver& observer) {
  validate(cfg);
  for (int d : cfg.source_domains) {
    if (d < 0 || d >= ds.n_domains) {
      throw ContractError("source domain " + std::to_string(d) + " is not in the dataset");
    }
  }
  TrainResult result{init_params(resolve_model_config(cfg, ds), cfg.seed), {}};
  if (cfg.total_iters == 0) return result;

  ModelParams& params = result.params;
  OptimizerState opt(params);
  BalancedBatchSampler sampler(ds, cfg.source_domains, cfg.batch_size,
                               cfg.seed ^ 0xd1b54a32d192ed03ULL);
  result.history.records.reserve(cfg.total_iters);

  for (std::size_t it = 0; it < cfg.total_iters; ++it) {
    const double lambda = lambda_at(it, cfg.total_iters);
    const std::vector<Sample> batch = sampler.next();
    try {
      Graph g;
      const BoundModel m = bind(g, params);
      const Objective obj =
          build_objective(m, g.constant(feature_matrix(batch)), batch, cfg, lambda);
      g.backward(obj.total);
      std::vector<Tensor> grads;
      grads.reserve(m.leaves.size());
      for (Var leaf : m.leaves) grads.push_back(leaf.grad());
      opt.step(params, grads, cfg.lr, cfg.momentum, cfg.weight_decay);
      if (params.config.normalize) project_classifier_weights(params.classifier);

      IterRecord rec;
      rec.iter = it;
      rec.lambda = lambda;
      rec.l_cls = obj.parts.cls.value().item();
      rec.l_ada = obj.parts.ada ? obj.parts.ada->value().item() : 0.0;
      rec.l_astrip = obj.parts.trip ? obj.parts.trip->value().item() : 0.0;
      rec.l_total = obj.total.value().item();
      result.history.records.push_back(rec);
    } catch (const NonFiniteLossError& e) {
      throw DivergenceError("diverged at iteration " + std::to_string(it) + ": " + e.what(),
                            std::move(result.history));
    } catch (const DegenerateInputError& e) {
      throw DivergenceError("collapsed at iteration " + std::to_string(it) + ": " + e.what(),
                            std::move(result.history));
    }
    if (observer) observer(it, params);
  }
  return result;
}

TrainResult train_bdg(TrainConfig cfg, const Dataset& ds, const StepObserver& observer) {
  cfg.mode = Mode::kBdg;
  return train(cfg, ds, observer);
}

}  // namespace ssdg
