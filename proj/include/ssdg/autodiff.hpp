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
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ssdg/errors.hpp"
#include "ssdg/tensor.hpp"

namespace ssdg {

class Graph;

using NodeId = std::size_t;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

  NodeId id() const { return id_; }
  Graph& graph() const { return *graph_; }
  const Tensor& value() const;
  /// Gradient after Graph::backward; zeros if nothing flowed here.
  Tensor grad() const;
  bool requires_grad() const;

 private:
  Graph* graph_ = nullptr;
  NodeId id_ = 0;
};

/// Define-by-run tape. Nodes are appended in evaluation order, so the node
/// sequence is already topologically sorted and backward simply walks it in
/// reverse, visiting each node once. Build a fresh Graph per forward pass.
class Graph {
 public:
  /// Receives the upstream gradient of the node and one slot per input;
  /// a slot is null when that input does not require a gradient. Slots must
  /// be accumulated into (+=), never overwritten.
  using BackwardFn = std::function<void(const Tensor& upstream, std::span<Tensor* const> grads)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Constant input; no gradient is tracked.
  Var constant(Tensor value);
  /// Leaf whose gradient is wanted (a parameter or an input under test).
  Var leaf(Tensor value);

  /// Appends an op result. `backward` is dropped when no input requires grad.
  Var record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward);

  /// Reverse sweep from a scalar root, seeding d(root)/d(root) = 1. Clears
  /// gradients from any earlier sweep first.
  void backward(Var root);

  const Tensor& value(NodeId id) const { return nodes_.at(id).value; }
  Tensor grad(NodeId id) const;
  bool requires_grad(NodeId id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    std::vector<NodeId> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    Tensor grad;
    bool has_grad = false;
  };

  std::vector<Node> nodes_;
};

/// Differentiable operations. All inputs must belong to the same Graph.
namespace ops {

/// (n x k) * (k x m)
Var matmul(Var a, Var b);
/// Adds a length-m bias vector to every row of an (n x m) matrix.
Var bias_add(Var x, Var bias);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Elementwise product of equal-shaped tensors.
Var mul(Var a, Var b);
Var relu(Var x);
Var scalar_mul(Var x, double c);
Var add_scalar(Var x, double c);
Var sum(Var x);
Var mean(Var x);

/// Gradient reversal: identity forward, multiplies the backward gradient by
/// -lambda. Rejects negative or non-finite lambda.
Var grl(Var x, double lambda);

/// Row-wise unit-norm projection. Throws DegenerateInputError when a row's
/// norm is below kNormalizeEpsilon.
inline constexpr double kNormalizeEpsilon = 1e-12;
Var l2_normalize(Var x);

/// Mean over rows of -log softmax(logits)[label], computed with the
/// log-sum-exp shift.
Var softmax_cross_entropy(Var logits, std::span<const int> labels);

/// (n x d) -> (n x n) squared Euclidean distances.
Var pairwise_sq_dist(Var z);

/// Selects rows of an (n x d) matrix; indices may repeat.
Var gather_rows(Var x, std::vector<std::size_t> rows);
/// Selects (row, col) entries of a matrix into a vector.
Var gather_entries(Var x, std::vector<std::pair<std::size_t, std::size_t>> entries);

}  // namespace ops

}  // namespace ssdg
