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
#include <span>
#include <string>
#include <vector>

#include "ssdg/autodiff.hpp"
#include "ssdg/domain_synth.hpp"

namespace ssdg {

struct ModelConfig {
  std::size_t input_dim = 16;
  std::size_t hidden = 64;
  /// Bottleneck width.
  std::size_t embedding = 32;
  std::size_t disc_hidden = 32;
  /// Number of source domains the discriminator separates.
  std::size_t n_domains = 3;
  /// Logit scale applied after feature normalization.
  double scale = 8.0;
  /// false: raw bottleneck features, classifier with bias and free weights.
  bool normalize = true;
};

struct Parameter {
  std::string name;
  Tensor value;
  /// Weight decay applies to this parameter.
  bool decay = true;
};

struct GeneratorParams {
  Parameter w1, b1, w2, b2;
};

/// Columns are class weight vectors: column 0 fake, column 1 real.
struct ClassifierParams {
  Parameter w;
  /// Only used when normalization is off; stays zero otherwise.
  Parameter b;
};

struct DiscriminatorParams {
  Parameter w1, b1, w2, b2;
};

/// The single generator is shared by real and fake samples.
struct ModelParams {
  ModelConfig config;
  GeneratorParams generator;
  ClassifierParams classifier;
  DiscriminatorParams discriminator;

  /// Stable order used by the optimizer and checkpoints.
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; classifier
/// columns are then projected to unit norm when normalization is on.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Parameters registered as leaves of one graph.
struct BoundGenerator {
  Var w1, b1, w2, b2;
};
struct BoundClassifier {
  Var w, b;
};
struct BoundDiscriminator {
  Var w1, b1, w2, b2;
};
struct BoundModel {
  const ModelConfig* config = nullptr;
  BoundGenerator generator;
  BoundClassifier classifier;
  BoundDiscriminator discriminator;
  /// Parallel to ModelParams::all().
  std::vector<Var> leaves;
};

BoundModel bind(Graph& g, const ModelParams& params);

struct GeneratorOutput {
  /// Unit-norm rows (raw bottleneck output when normalization is off).
  Var normalized;
  /// `normalized` times the logit scale; this is what the classifier sees.
  Var embedding;
};

GeneratorOutput forward_generator(const BoundModel& m, Var x);

/// 2-class logits. With normalization on, W has unit columns and no bias, so
/// logit_i = |z| cos(theta_i).
Var forward_classifier(const BoundModel& m, Var z);

/// Domain logits for embeddings of real samples only. `row_classes` gives the
/// class of every row of `z_real`; any fake row is a ContractError, as is an
/// empty batch. Gradients into `z_real` pass through grl(lambda).
Var forward_discriminator(const BoundModel& m, Var z_real, std::span<const Cls> row_classes,
                          double lambda);

/// Same head without the real-only guard (symmetric baseline).
Var discriminator_logits(const BoundModel& m, Var z, double lambda);

/// Rescales each classifier column to unit norm. Throws DegenerateInputError
/// on a zero column.
void project_classifier_weights(ClassifierParams& p);

/// Row-major (n x input_dim) feature matrix of the given samples.
Tensor feature_matrix(std::span<const Sample> samples);

/// Inference-only embeddings (rows of `embedding`, norm = scale).
Tensor embed(const ModelParams& params, std::span<const Sample> samples);

/// Softmax probability of the real class for each sample.
std::vector<double> real_scores(const ModelParams& params, std::span<const Sample> samples);

}  // namespace ssdg
