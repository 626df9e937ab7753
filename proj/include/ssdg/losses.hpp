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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssdg/autodiff.hpp"
#include "ssdg/model.hpp"

namespace ssdg {

struct LossWeights {
  /// Weight of the adversarial term.
  double lambda1 = 1.0;
  /// Weight of the triplet term.
  double lambda2 = 1.0;
  /// Triplet margin.
  double alpha = 0.1;
};

void validate(const LossWeights& w);

/// GRL coefficient 2 / (1 + exp(-10 k)) - 1 with k = current / total.
double lambda_at(std::size_t current_iter, std::size_t total_iters);

Var classification_loss(Var logits, std::span<const int> cls_labels);

/// Cross-entropy of the discriminator over the domain labels of the real rows
/// of `features`. Fake rows never enter the graph of this term; a batch
/// without real samples gives a constant zero.
Var single_side_adversarial_loss(const BoundModel& m, Var features, std::span<const Cls> cls,
                                 std::span<const int> domain_labels, double lambda);

/// Baseline variant: every row is aligned, regardless of class.
Var symmetric_adversarial_loss(const BoundModel& m, Var features,
                               std::span<const int> domain_labels, double lambda);

enum class Mining { kBatchHard, kAll };

std::string to_string(Mining m);
Mining parse_mining(const std::string& s);

struct Triplet {
  std::size_t anchor, positive, negative;
};

struct MinedTriplets {
  std::vector<Triplet> triplets;
  /// Anchors that own at least one triplet.
  std::size_t anchors = 0;
};

/// Triplet selection on a squared-distance matrix. Batch-hard takes, per
/// anchor, the farthest positive and the nearest negative; ties go to the
/// lowest index. Positives exclude the anchor itself.
MinedTriplets mine_triplets(const Tensor& sq_dist, std::span<const int> labels, Mining mining);

/// Sum of max(0, d(a,p) - d(a,n) + alpha) over mined triplets, divided by the
/// number of anchors that own a triplet. Throws ContractError when the batch
/// holds fewer than two categories.
Var asymmetric_triplet_loss(Var embeddings, std::span<const int> labels, double alpha,
                            Mining mining);

struct LossParts {
  Var cls;
  std::optional<Var> ada;
  std::optional<Var> trip;
};

/// L_cls + lambda1 L_ada + lambda2 L_trip; absent terms are skipped.
/// Throws NonFiniteLossError on a non-finite part.
Var total_loss(const LossParts& parts, const LossWeights& w);

}  // namespace ssdg
