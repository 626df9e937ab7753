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

#include "ssdg/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssdg/kernels.hpp"

namespace ssdg {

const Tensor& Var::value() const { return graph_->value(id_); }
Tensor Var::grad() const { return graph_->grad(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }

Var Graph::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, false, {}, false});
  return {this, nodes_.size() - 1};
}

Var Graph::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, true, {}, false});
  return {this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward) {
  bool needs = false;
  for (NodeId in : inputs) {
    if (in >= nodes_.size()) throw std::out_of_range("op input is not a node of this graph");
    needs = needs || nodes_[in].requires_grad;
  }
  if (!needs) backward = nullptr;
  nodes_.push_back(
      Node{std::move(value), std::move(inputs), std::move(backward), needs, {}, false});
  return {this, nodes_.size() - 1};
}

Tensor Graph::grad(NodeId id) const {
  const Node& node = nodes_.at(id);
  if (node.has_grad) return node.grad;
  return Tensor::zeros_like(node.value);
}

void Graph::backward(Var root) {
  if (&root.graph() != this) throw std::invalid_argument("backward root belongs to another graph");
  Node& top = nodes_.at(root.id());
  if (top.value.size() != 1) {
    throw ShapeError("backward root must be a scalar, got " + shape_to_string(top.value.shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  top.grad = Tensor::zeros_like(top.value);
  top.grad.fill(1.0);
  top.has_grad = true;

  std::vector<Tensor*> slots;
  for (NodeId id = root.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.has_grad || !node.backward) continue;
    slots.clear();
    for (NodeId in : node.inputs) {
      Node& input = nodes_[in];
      if (!input.requires_grad) {
        slots.push_back(nullptr);
        continue;
      }
      if (!input.has_grad) {
        input.grad = Tensor::zeros_like(input.value);
        input.has_grad = true;
      }
      slots.push_back(&input.grad);
    }
    node.backward(node.grad, slots);
  }
}

namespace ops {

namespace {

Graph& same_graph(Var a, Var b) {
  if (&a.graph() != &b.graph()) throw std::invalid_argument("operands belong to different graphs");
  return a.graph();
}

void require_matrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(what) + " expects a matrix, got " + shape_to_string(t.shape()));
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  if (bv.rows() != k) {
    throw ShapeError("matmul " + shape_to_string(av.shape()) + " * " + shape_to_string(bv.shape()));
  }
  Tensor out({n, m});
  kernels::omp::matmul(av.data(), bv.data(), out.data(), n, k, m);
  const NodeId ia = a.id(), ib = b.id();
  return g.record(std::move(out), {ia, ib},
                  [&g, ia, ib, n, k, m](const Tensor& up, std::span<Tensor* const> grads) {
                    if (grads[0]) {
                      Tensor da({n, k});
                      kernels::omp::matmul_nt(up.data(), g.value(ib).data(), da.data(), n, m, k);
                      *grads[0] += da;
                    }
                    if (grads[1]) {
                      Tensor db({k, m});
                      kernels::omp::matmul_tn(g.value(ia).data(), up.data(), db.data(), n, k, m);
                      *grads[1] += db;
                    }
                  });
}

Var bias_add(Var x, Var bias) {
  Graph& g = same_graph(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  require_matrix(xv, "bias_add");
  if (bv.rank() != 1 || bv.size() != xv.cols()) {
    throw ShapeError("bias_add " + shape_to_string(xv.shape()) + " + " +
                     shape_to_string(bv.shape()));
  }
  Tensor out = xv;
  const std::size_t n = xv.rows(), m = xv.cols();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) += bv[j];
  return g.record(std::move(out), {x.id(), bias.id()},
                  [n, m](const Tensor& up, std::span<Tensor* const> grads) {
                    if (grads[0]) *grads[0] += up;
                    if (grads[1]) {
                      Tensor& db = *grads[1];
                      for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < m; ++j) db[j] += up(i, j);
                    }
                  });
}

Var add(Var a, Var b) {
  Graph& g = same_graph(a, b);
  if (a.value().shape() != b.value().shape()) {
    throw ShapeError("add " + shape_to_string(a.value().shape()) + " + " +
                     shape_to_string(b.value().shape()));
  }
  Tensor out = a.value();
  out += b.value();
  return g.record(std::move(out), {a.id(), b.id()},
                  [](const Tensor& up, std::span<Tensor* const> grads) {
                    if (grads[0]) *grads[0] += up;
                    if (grads[1]) *grads[1] += up;
                  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph(a, b);
  if (a.value().shape() != b.value().shape()) {
    throw ShapeError("sub " + shape_to_string(a.value().shape()) + " - " +
                     shape_to_string(b.value().shape()));
  }
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return g.record(std::move(out), {a.id(), b.id()},
                  [](const Tensor& up, std::span<Tensor* const> grads) {
                    if (grads[0]) *grads[0] += up;
                    if (grads[1]) {
                      Tensor& db = *grads[1];
                      for (std::size_t i = 0; i < up.size(); ++i) db[i] -= up[i];
                    }
                  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph(a, b);
  if (a.value().shape() != b.value().shape()) {
    throw ShapeError("mul " + shape_to_string(a.value().shape()) + " * " +
                     shape_to_string(b.value().shape()));
  }
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return g.record(std::move(out), {ia, ib},
                  [&g, ia, ib](const Tensor& up, std::span<Tensor* const> grads) {
                    if (grads[0]) {
                      const Tensor& bv = g.value(ib);
                      for (std::size_t i = 0; i < up.size(); ++i) (*grads[0])[i] += up[i] * bv[i];
                    }
                    if (grads[1]) {
                      const Tensor& av = g.value(ia);
                      for (std::size_t i = 0; i < up.size(); ++i) (*grads[1])[i] += up[i] * av[i];
                    }
                  });
}

Var relu(Var x) {
  Graph& g = x.graph();
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  const NodeId ix = x.id();
  return g.record(std::move(out), {ix}, [&g, ix](const Tensor& up, std::span<Tensor* const> grads) {
    const Tensor& xv = g.value(ix);
    Tensor& dx = *grads[0];
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (xv[i] > 0.0) dx[i] += up[i];
    }
  });
}

Var scalar_mul(Var x, double c) {
  Graph& g = x.graph();
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return g.record(std::move(out), {x.id()}, [c](const Tensor& up, std::span<Tensor* const> grads) {
    Tensor& dx = *grads[0];
    for (std::size_t i = 0; i < up.size(); ++i) dx[i] += c * up[i];
  });
}

Var add_scalar(Var x, double c) {
  Graph& g = x.graph();
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  return g.record(std::move(out), {x.id()},
                  [](const Tensor& up, std::span<Tensor* const> grads) { *grads[0] += up; });
}

Var sum(Var x) {
  Graph& g = x.graph();
  double acc = 0.0;
  for (double v : x.value().data()) acc += v;
  return g.record(Tensor::scalar(acc), {x.id()},
                  [](const Tensor& up, std::span<Tensor* const> grads) {
                    Tensor& dx = *grads[0];
                    const double u = up.item();
                    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += u;
                  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scalar_mul(sum(x), 1.0 / static_cast<double>(n));
}

Var grl(Var x, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ContractError("gradient reversal needs a finite lambda >= 0, got " +
                        std::to_string(lambda));
  }
  Graph& g = x.graph();
  return g.record(x.value(), {x.id()}, [lambda](const Tensor& up, std::span<Tensor* const> grads) {
    Tensor& dx = *grads[0];
    for (std::size_t i = 0; i < up.size(); ++i) dx[i] += -lambda * up[i];
  });
}

Var l2_normalize(Var x) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  require_matrix(xv, "l2_normalize");
  const std::size_t n = xv.rows(), d = xv.cols();
  Tensor out({n, d});
  std::vector<double> norms(n);
  kernels::omp::l2_normalize_rows(xv.data(), out.data(), norms, n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norms[i] >= kNormalizeEpsilon)) {
      throw DegenerateInputError("l2_normalize: row " + std::to_string(i) + " has norm " +
                                 std::to_string(norms[i]) + " (collapsed embedding?)");
    }
  }
  const NodeId self = g.size();
  return g.record(
      std::move(out), {x.id()},
      [&g, self, norms = std::move(norms), n, d](const Tensor& up, std::span<Tensor* const> grads) {
        Tensor dx({n, d});
        kernels::omp::l2_normalize_backward(g.value(self).data(), norms, up.data(), dx.data(), n,
                                            d);
        *grads[0] += dx;
      });
}

Var softmax_cross_entropy(Var logits, std::span<const int> labels) {
  Graph& g = logits.graph();
  const Tensor& lv = logits.value();
  require_matrix(lv, "softmax_cross_entropy");
  const std::size_t n = lv.rows(), k = lv.cols();
  if (labels.size() != n) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n) + " rows");
  }
  if (n == 0) throw ShapeError("softmax_cross_entropy on an empty batch");
  Tensor probs({n, k});
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw ContractError("softmax_cross_entropy: label " + std::to_string(label) +
                          " outside [0, " + std::to_string(k) + ")");
    }
    double mx = lv(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, lv(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(lv(i, j) - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t j = 0; j < k; ++j) probs(i, j) = std::exp(lv(i, j) - log_z);
    total += log_z - lv(i, static_cast<std::size_t>(label));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<int> saved(labels.begin(), labels.end());
  return g.record(Tensor::scalar(total * inv_n), {logits.id()},
                  [probs = std::move(probs), saved = std::move(saved), inv_n, n, k](
                      const Tensor& up, std::span<Tensor* const> grads) {
                    Tensor& dl = *grads[0];
                    const double u = up.item() * inv_n;
                    for (std::size_t i = 0; i < n; ++i) {
                      for (std::size_t j = 0; j < k; ++j) {
                        const double onehot = static_cast<int>(j) == saved[i] ? 1.0 : 0.0;
                        dl(i, j) += u * (probs(i, j) - onehot);
                      }
                    }
                  });
}

Var pairwise_sq_dist(Var z) {
  Graph& g = z.graph();
  const Tensor& zv = z.value();
  require_matrix(zv, "pairwise_sq_dist");
  const std::size_t n = zv.rows(), d = zv.cols();
  if (n == 0) throw ShapeError("pairwise_sq_dist on an empty batch");
  Tensor out({n, n});
  kernels::omp::pairwise_sq_dist(zv.data(), out.data(), n, d);
  const NodeId iz = z.id();
  return g.record(
      std::move(out), {iz}, [&g, iz, n, d](const Tensor& up, std::span<Tensor* const> grads) {
        Tensor dz({n, d});
        kernels::omp::pairwise_sq_dist_backward(g.value(iz).data(), up.data(), dz.data(), n, d);
        *grads[0] += dz;
      });
}

Var gather_rows(Var x, std::vector<std::size_t> rows) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  require_matrix(xv, "gather_rows");
  const std::size_t n = xv.rows(), d = xv.cols();
  Tensor out({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n) throw std::out_of_range("gather_rows: row index out of range");
    for (std::size_t c = 0; c < d; ++c) out(r, c) = xv(rows[r], c);
  }
  return g.record(std::move(out), {x.id()},
                  [rows = std::move(rows), d](const Tensor& up, std::span<Tensor* const> grads) {
                    Tensor& dx = *grads[0];
                    for (std::size_t r = 0; r < rows.size(); ++r)
                      for (std::size_t c = 0; c < d; ++c) dx(rows[r], c) += up(r, c);
                  });
}

Var gather_entries(Var x, std::vector<std::pair<std::size_t, std::size_t>> entries) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  require_matrix(xv, "gather_entries");
  Tensor out({entries.size()});
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto [r, c] = entries[e];
    if (r >= xv.rows() || c >= xv.cols()) {
      throw std::out_of_range("gather_entries: index out of range");
    }
    out[e] = xv(r, c);
  }
  return g.record(std::move(out), {x.id()},
                  [entries = std::move(entries)](const Tensor& up, std::span<Tensor* const> grads) {
                    Tensor& dx = *grads[0];
                    for (std::size_t e = 0; e < entries.size(); ++e) {
                      dx(entries[e].first, entries[e].second) += up[e];
                    }
                  });
}

}  // namespace ops
}  // namespace ssdg
