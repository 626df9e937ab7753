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

#include "ssdg/losses.hpp"

#include <cmath>
#include <set>

namespace ssdg {

void validate(const LossWeights& w) {
  for (double v : {w.lambda1, w.lambda2, w.alpha}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ContractError("loss weights and margin must be finite and non-negative");
    }
  }
}

double lambda_at(std::size_t current_iter, std::size_t total_iters) {
  if (total_iters == 0) throw ContractError("lambda schedule needs total_iters > 0");
  if (current_iter > total_iters) throw ContractError("current_iter exceeds total_iters");
  const double k = static_cast<double>(current_iter) / static_cast<double>(total_iters);
  return 2.0 / (1.0 + std::exp(-10.0 * k)) - 1.0;
}

Var classification_loss(Var logits, std::span<const int> cls_labels) {
  return ops::softmax_cross_entropy(logits, cls_labels);
}

Var single_side_adversarial_loss(const BoundModel& m, Var features, std::span<const Cls> cls,
                                 std::span<const int> domain_labels, double lambda) {
  if (cls.size() != domain_labels.size() || cls.size() != features.value().rows()) {
    throw ShapeError("single_side_adversarial_loss: label lists do not match the batch");
  }
  std::vector<std::size_t> real_rows;
  std::vector<Cls> real_cls;
  std::vector<int> real_domains;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] != Cls::kReal) continue;
    real_rows.push_back(i);
    real_cls.push_back(cls[i]);
    real_domains.push_back(domain_labels[i]);
  }
  if (real_rows.empty()) return features.graph().constant(Tensor::scalar(0.0));
  Var z_real = ops::gather_rows(features, std::move(real_rows));
  Var logits = forward_discriminator(m, z_real, real_cls, lambda);
  return ops::softmax_cross_entropy(logits, real_domains);
}

Var symmetric_adversarial_loss(const BoundModel& m, Var features,
                               std::span<const int> domain_labels, double lambda) {
  Var logits = discriminator_logits(m, features, lambda);
  return ops::softmax_cross_entropy(logits, domain_labels);
}

std::string to_string(Mining m) { return m == Mining::kAll ? "all" : "batch-hard"; }

Mining parse_mining(const std::string& s) {
  if (s == "all") return Mining::kAll;
  if (s == "batch-hard") return Mining::kBatchHard;
  throw ContractError("unknown mining strategy '" + s + "' (expected all | batch-hard)");
}

MinedTriplets mine_triplets(const Tensor& d, std::span<const int> labels, Mining mining) {
  const std::size_t n = labels.size();
  if (d.rank() != 2 || d.rows() != n || d.cols() != n) {
    throw ShapeError("mine_triplets: distance matrix does not match the label count");
  }
  MinedTriplets out;
  for (std::size_t a = 0; a < n; ++a) {
    if (mining == Mining::kAll) {
      bool owns = false;
      for (std::size_t p = 0; p < n; ++p) {
        if (p == a || labels[p] != labels[a]) continue;
        for (std::size_t q = 0; q < n; ++q) {
          if (labels[q] == labels[a]) continue;
          out.triplets.push_back({a, p, q});
          owns = true;
        }
      }
      out.anchors += owns ? 1 : 0;
      continue;
    }
    std::size_t best_p = n, best_n = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      if (labels[j] == labels[a]) {
        if (best_p == n || d(a, j) > d(a, best_p)) best_p = j;
      } else {
        if (best_n == n || d(a, j) < d(a, best_n)) best_n = j;
      }
    }
    if (best_p == n || best_n == n) continue;
    out.triplets.push_back({a, best_p, best_n});
    ++out.anchors;
  }
  return out;
}

Var asymmetric_triplet_loss(Var embeddings, std::span<const int> labels, double alpha,
                            Mining mining) {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ContractError("triplet margin must be >= 0");
  if (labels.size() != embeddings.value().rows()) {
    throw ShapeError("asymmetric_triplet_loss: label count does not match the batch");
  }
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw ContractError("triplet loss needs at least two categories in the batch");
  }
  Var dist = ops::pairwise_sq_dist(embeddings);
  const MinedTriplets mined = mine_triplets(dist.value(), labels, mining);
  if (mined.triplets.empty()) {
    throw ContractError("triplet loss: no anchor has both a positive and a negative");
  }
  std::vector<std::pair<std::size_t, std::size_t>> ap, an;
  ap.reserve(mined.triplets.size());
  an.reserve(mined.triplets.size());
  for (const Triplet& t : mined.triplets) {
    ap.emplace_back(t.anchor, t.positive);
    an.emplace_back(t.anchor, t.negative);
  }
  Var d_ap = ops::gather_entries(dist, std::move(ap));
  Var d_an = ops::gather_entries(dist, std::move(an));
  Var hinge = ops::relu(ops::add_scalar(ops::sub(d_ap, d_an), alpha));
  return ops::scalar_mul(ops::sum(hinge), 1.0 / static_cast<double>(mined.anchors));
}

Var total_loss(const LossParts& parts, const LossWeights& w) {
  validate(w);
  auto check = [](Var v, const char* name) {
    if (!v.value().all_finite()) throw NonFiniteLossError(std::string(name) + " is not finite");
  };
  check(parts.cls, "classification loss");
  Var total = parts.cls;
  if (parts.ada) {
    check(*parts.ada, "adversarial loss");
    total = ops::add(total, ops::scalar_mul(*parts.ada, w.lambda1));
  }
  if (parts.trip) {
    check(*parts.trip, "triplet loss");
    total = ops::add(total, ops::scalar_mul(*parts.trip, w.lambda2));
  }
  return total;
}

}  // namespace ssdg
