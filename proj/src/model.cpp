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

#include "ssdg/model.hpp"

#include <cmath>
#include <random>

namespace ssdg {

namespace {

Parameter uniform_param(std::string name, Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = dist(rng);
  return Parameter{std::move(name), std::move(t), true};
}

}  // namespace

std::vector<Parameter*> ModelParams::all() {
  return {&generator.w1,     &generator.b1,    &generator.w2,     &generator.b2,
          &classifier.w,     &classifier.b,    &discriminator.w1, &discriminator.b1,
          &discriminator.w2, &discriminator.b2};
}

std::vector<const Parameter*> ModelParams::all() const {
  auto ptrs = const_cast<ModelParams*>(this)->all();
  return {ptrs.begin(), ptrs.end()};
}

ModelParams init_params(const ModelConfig& c, std::uint64_t seed) {
  if (c.input_dim == 0 || c.hidden == 0 || c.embedding == 0 || c.disc_hidden == 0 ||
      c.n_domains == 0) {
    throw ContractError("model widths must be positive");
  }
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) throw ContractError("logit scale must be > 0");
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.config = c;
  p.generator.w1 = uniform_param("generator.w1", {c.input_dim, c.hidden}, c.input_dim, rng);
  p.generator.b1 = uniform_param("generator.b1", {c.hidden}, c.input_dim, rng);
  p.generator.w2 = uniform_param("generator.w2", {c.hidden, c.embedding}, c.hidden, rng);
  p.generator.b2 = uniform_param("generator.b2", {c.embedding}, c.hidden, rng);
  p.classifier.w = uniform_param("classifier.w", {c.embedding, 2}, c.embedding, rng);
  p.classifier.b = Parameter{"classifier.b", Tensor({2}), true};
  p.discriminator.w1 =
      uniform_param("discriminator.w1", {c.embedding, c.disc_hidden}, c.embedding, rng);
  p.discriminator.b1 = uniform_param("discriminator.b1", {c.disc_hidden}, c.embedding, rng);
  p.discriminator.w2 =
      uniform_param("discriminator.w2", {c.disc_hidden, c.n_domains}, c.disc_hidden, rng);
  p.discriminator.b2 = uniform_param("discriminator.b2", {c.n_domains}, c.disc_hidden, rng);
  if (c.normalize) {
    // Projection would undo any decay of W; the bias is unused.
    p.classifier.w.decay = false;
    p.classifier.b.decay = false;
    project_classifier_weights(p.classifier);
  }
  return p;
}

BoundModel bind(Graph& g, const ModelParams& params) {
  BoundModel m;
  m.config = &params.config;
  for (const Parameter* p : params.all()) m.leaves.push_back(g.leaf(p->value));
  const auto& l = m.leaves;
  m.generator = {l[0], l[1], l[2], l[3]};
  m.classifier = {l[4], l[5]};
  m.discriminator = {l[6], l[7], l[8], l[9]};
  return m;
}

GeneratorOutput forward_generator(const BoundModel& m, Var x) {
  const ModelConfig& c = *m.config;
  if (x.value().rank() != 2 || x.value().cols() != c.input_dim) {
    throw ShapeError("generator expects rows of width " + std::to_string(c.input_dim) + ", got " +
                     shape_to_string(x.value().shape()));
  }
  const auto& gp = m.generator;
  Var h = ops::relu(ops::bias_add(ops::matmul(x, gp.w1), gp.b1));
  Var z = ops::bias_add(ops::matmul(h, gp.w2), gp.b2);
  if (!c.normalize) return {z, z};
  Var unit = ops::l2_normalize(z);
  return {unit, ops::scalar_mul(unit, c.scale)};
}

Var forward_classifier(const BoundModel& m, Var z) {
  Var logits = ops::matmul(z, m.classifier.w);
  if (!m.config->normalize) logits = ops::bias_add(logits, m.classifier.b);
  return logits;
}

Var discriminator_logits(const BoundModel& m, Var z, double lambda) {
  const auto& d = m.discriminator;
  Var r = ops::grl(z, lambda);
  Var h = ops::relu(ops::bias_add(ops::matmul(r, d.w1), d.b1));
  return ops::bias_add(ops::matmul(h, d.w2), d.b2);
}

Var forward_discriminator(const BoundModel& m, Var z_real, std::span<const Cls> row_classes,
                          double lambda) {
  if (row_classes.size() != z_real.value().rows()) {
    throw ShapeError("forward_discriminator: class list does not match rows");
  }
  if (row_classes.empty()) {
    throw ContractError("forward_discriminator: no real samples in the batch");
  }
  for (Cls c : row_classes) {
    if (c != Cls::kReal) {
      throw ContractError("forward_discriminator: fake sample passed to the real-only head");
    }
  }
  return discriminator_logits(m, z_real, lambda);
}

void project_classifier_weights(ClassifierParams& p) {
  Tensor& w = p.w.value;
  for (std::size_t col = 0; col < w.cols(); ++col) {
    double acc = 0.0;
    for (std::size_t r = 0; r < w.rows(); ++r) acc += w(r, col) * w(r, col);
    const double norm = std::sqrt(acc);
    if (!(norm > 0.0)) {
      throw DegenerateInputError("classifier column " + std::to_string(col) + " has zero norm");
    }
    for (std::size_t r = 0; r < w.rows(); ++r) w(r, col) /= norm;
  }
}

Tensor feature_matrix(std::span<const Sample> samples) {
  if (samples.empty()) throw ShapeError("feature_matrix of an empty sample list");
  const std::size_t dim = samples.front().features.size();
  Tensor x({samples.size(), dim});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].features.size() != dim) throw ShapeError("ragged sample features");
    for (std::size_t c = 0; c < dim; ++c) x(i, c) = samples[i].features[c];
  }
  return x;
}

Tensor embed(const ModelParams& params, std::span<const Sample> samples) {
  Graph g;
  const BoundModel m = bind(g, params);
  return forward_generator(m, g.constant(feature_matrix(samples))).embedding.value();
}

std::vector<double> real_scores(const ModelParams& params, std::span<const Sample> samples) {
  Graph g;
  const BoundModel m = bind(g, params);
  const auto out = forward_generator(m, g.constant(feature_matrix(samples)));
  const Tensor& logits = forward_classifier(m, out.embedding).value();
  std::vector<double> scores(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // softmax over two logits: p(real) = 1 / (1 + exp(l0 - l1))
    scores[i] = 1.0 / (1.0 + std::exp(logits(i, 0) - logits(i, 1)));
  }
  return scores;
}

}  // namespace ssdg
