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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gradcheck.hpp"
#include "gradient_cases.hpp"
#include "ssdg/autodiff.hpp"
#include "ssdg/kernels.hpp"

namespace ssdg::testing {
// Names the parameter in test listings instead of dumping its bytes.
inline void PrintTo(const GradCase& c, std::ostream* os) { *os << c.name; }
}  // namespace ssdg::testing

namespace ssdg {
namespace {

using testing::max_gradient_error;
using testing::random_projection;
using testing::random_tensor;

constexpr double kGradTolerance = 1e-5;

TEST(Tensor, ShapeChecks) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  EXPECT_THROW(Tensor::scalar(1.0).rows(), ShapeError);
  Tensor m = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_THROW(m += Tensor({3, 2}), ShapeError);
  EXPECT_THROW(m.item(), ShapeError);
  EXPECT_EQ(Tensor().item(), 0.0);
}

TEST(Ops, MatmulExample) {
  Graph g;
  Var a = g.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  Var b = g.constant(Tensor::matrix(2, 1, {5, 6}));
  EXPECT_EQ(ops::matmul(a, b).value(), Tensor::matrix(2, 1, {17, 39}));
  EXPECT_THROW(ops::matmul(b, b), ShapeError);
}

TEST(Ops, BiasReluExample) {
  Graph g;
  Var x = g.constant(Tensor::matrix(2, 2, {-1, 2, 0.5, -3}));
  Var b = g.constant(Tensor({2}, {0.5, 0.5}));
  EXPECT_EQ(ops::relu(ops::bias_add(x, b)).value(), Tensor::matrix(2, 2, {0, 2.5, 1, 0}));
}

TEST(Ops, SoftmaxCrossEntropyExample) {
  Graph g;
  // Uniform logits: loss is log(C) whatever the label.
  Var logits = g.constant(Tensor::matrix(2, 4, {0, 0, 0, 0, 7, 7, 7, 7}));
  const std::vector<int> labels{1, 3};
  EXPECT_NEAR(ops::softmax_cross_entropy(logits, labels).value().item(), std::log(4.0), 1e-15);
  const std::vector<int> bad{1, 4};
  EXPECT_THROW(ops::softmax_cross_entropy(logits, bad), ContractError);
}

TEST(Ops, SoftmaxCrossEntropyIsStableForHugeLogits) {
  Graph g;
  Var logits = g.leaf(Tensor::matrix(1, 2, {1000.0, -1000.0}));
  const std::vector<int> labels{1};
  Var loss = ops::softmax_cross_entropy(logits, labels);
  EXPECT_DOUBLE_EQ(loss.value().item(), 2000.0);
  g.backward(loss);
  EXPECT_TRUE(logits.grad().all_finite());
  EXPECT_DOUBLE_EQ(logits.grad()(0, 0), 1.0);
}

TEST(Ops, L2NormalizeExample) {
  Graph g;
  Var x = g.constant(Tensor::matrix(2, 2, {3, 4, 0, -2}));
  const Tensor y = ops::l2_normalize(x).value();
  EXPECT_DOUBLE_EQ(y(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(y(0, 1), 0.8);
  EXPECT_DOUBLE_EQ(y(1, 1), -1.0);
}

TEST(Ops, L2NormalizeRejectsZeroRow) {
  Graph g;
  Var x = g.constant(Tensor::matrix(2, 2, {1, 1, 0, 0}));
  EXPECT_THROW(ops::l2_normalize(x), DegenerateInputError);
  Var tiny = g.constant(Tensor::matrix(1, 2, {1e-13, 0}));
  EXPECT_THROW(ops::l2_normalize(tiny), DegenerateInputError);
}

TEST(Ops, PairwiseSqDistExample) {
  Graph g;
  Var z = g.constant(Tensor::matrix(3, 2, {0, 0, 2, 0, 1, 1}));
  EXPECT_EQ(ops::pairwise_sq_dist(z).value(), Tensor::matrix(3, 3, {0, 4, 2, 4, 0, 2, 2, 2, 0}));
}

TEST(Ops, GatherExamples) {
  Graph g;
  Var x = g.leaf(Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6}));
  Var rows = ops::gather_rows(x, {2, 0, 2});
  EXPECT_EQ(rows.value(), Tensor::matrix(3, 2, {5, 6, 1, 2, 5, 6}));
  g.backward(ops::sum(rows));
  // Repeated rows accumulate.
  EXPECT_EQ(x.grad(), Tensor::matrix(3, 2, {1, 1, 0, 0, 2, 2}));
  EXPECT_THROW(ops::gather_rows(x, {3}), std::out_of_range);
  EXPECT_EQ(ops::gather_entries(x, {{0, 1}, {2, 0}}).value(), Tensor({2}, {2, 5}));
}

TEST(Ops, ShapeMismatchThrows) {
  Graph g;
  Var a = g.constant(Tensor({2, 2}));
  Var b = g.constant(Tensor({2, 3}));
  EXPECT_THROW(ops::add(a, b), ShapeError);
  EXPECT_THROW(ops::sub(a, b), ShapeError);
  EXPECT_THROW(ops::mul(a, b), ShapeError);
  EXPECT_THROW(ops::bias_add(a, g.constant(Tensor({3}))), ShapeError);
}

TEST(Ops, OperandsFromDifferentGraphsRejected) {
  Graph g1, g2;
  EXPECT_THROW(ops::add(g1.constant(Tensor({1})), g2.constant(Tensor({1}))), std::invalid_argument);
}

TEST(Autodiff, BackwardNeedsScalarRoot) {
  Graph g;
  Var x = g.leaf(Tensor({2, 2}));
  EXPECT_THROW(g.backward(x), ShapeError);
}

TEST(Autodiff, SharedSubexpressionAccumulates) {
  // f = sum(x * x + 3 x) evaluated through a diamond: df/dx = 2x + 3.
  Graph g;
  Var x = g.leaf(Tensor({3}, {1.0, -2.0, 0.5}));
  Var sq = ops::mul(x, x);
  Var f = ops::sum(ops::add(sq, ops::scalar_mul(x, 3.0)));
  g.backward(f);
  EXPECT_EQ(x.grad(), Tensor({3}, {5.0, -1.0, 4.0}));
}

TEST(Autodiff, SecondBackwardDoesNotAccumulate) {
  Graph g;
  Var x = g.leaf(Tensor({2}, {1.0, 2.0}));
  Var f = ops::sum(ops::scalar_mul(x, 2.0));
  g.backward(f);
  g.backward(f);
  EXPECT_EQ(x.grad(), Tensor({2}, {2.0, 2.0}));
}

TEST(Autodiff, ConstantsReceiveNoGradient) {
  Graph g;
  Var c = g.constant(Tensor({2}, {1.0, 2.0}));
  Var x = g.leaf(Tensor({2}, {3.0, 4.0}));
  g.backward(ops::sum(ops::mul(c, x)));
  EXPECT_FALSE(c.requires_grad());
  EXPECT_EQ(c.grad(), Tensor({2}));
  EXPECT_EQ(x.grad(), Tensor({2}, {1.0, 2.0}));
}

TEST(Grl, ForwardIdentityBackwardNegatedScaled) {
  std::mt19937_64 rng(3);
  for (double lambda : {0.0, 0.25, 1.0, 3.5}) {
    Graph g;
    Var x = g.leaf(random_tensor({4, 3}, rng));
    Var r = ops::grl(x, lambda);
    EXPECT_EQ(r.value(), x.value());
    const Tensor w = random_tensor({4, 3}, rng);
    g.backward(ops::sum(ops::mul(r, g.constant(w))));
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(x.grad()[i], -lambda * w[i]);
  }
}

TEST(Grl, RejectsInvalidLambda) {
  Graph g;
  Var x = g.leaf(Tensor({1}));
  EXPECT_THROW(ops::grl(x, -0.1), ContractError);
  EXPECT_THROW(ops::grl(x, std::numeric_limits<double>::quiet_NaN()), ContractError);
  EXPECT_THROW(ops::grl(x, std::numeric_limits<double>::infinity()), ContractError);
}

class GradientCase : public ::testing::TestWithParam<testing::GradCase> {};

TEST_P(GradientCase, MatchesCentralDifferences) {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    ASSERT_LT(GetParam().run(trial), kGradTolerance) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(Engine, GradientCase, ::testing::ValuesIn(testing::core_gradient_cases()),
                         [](const auto& info) { return info.param.name; });

TEST(Gradients, RemainingOps) {
  std::mt19937_64 rng(11);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::vector<Tensor> in{random_tensor({3, 4}, rng), random_tensor({3, 4}, rng)};
    const double err = max_gradient_error(
        [trial](Graph&, const std::vector<Var>& v) {
          Var s = ops::add(ops::sub(v[0], ops::scalar_mul(v[1], 0.5)), ops::mul(v[0], v[1]));
          Var picked =
              ops::gather_entries(ops::gather_rows(s, {2, 0, 2}), {{0, 1}, {1, 3}, {2, 1}});
          return ops::add(random_projection(s, trial), ops::mean(ops::mul(picked, picked)));
        },
        in);
    ASSERT_LT(err, kGradTolerance);
  }
}

TEST(Gradients, CompositeVariants) {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    ASSERT_LT(testing::check_composite(trial, Mode::kSsdg, Mining::kAll), kGradTolerance);
    ASSERT_LT(testing::check_composite(trial, Mode::kBdg, Mining::kBatchHard), kGradTolerance);
  }
}

// Sizes large enough to cross the parallel threshold.
TEST(Kernels, OpenMpMatchesSerialBitwise) {
  std::mt19937_64 rng(5);
  const std::size_t n = 97, k = 83, m = 71;
  const Tensor a = random_tensor({n, k}, rng), b = random_tensor({k, m}, rng);
  const Tensor bt = random_tensor({m, k}, rng), at = random_tensor({n, m}, rng);

  auto both = [](auto serial_fn, auto omp_fn, std::size_t out_size) {
    std::vector<double> s(out_size), o(out_size);
    serial_fn(s);
    omp_fn(o);
    return s == o;
  };
  namespace ks = kernels::serial;
  namespace ko = kernels::omp;
  EXPECT_TRUE(both([&](auto& c) { ks::matmul(a.data(), b.data(), c, n, k, m); },
                   [&](auto& c) { ko::matmul(a.data(), b.data(), c, n, k, m); }, n * m));
  EXPECT_TRUE(both([&](auto& c) { ks::matmul_tn(a.data(), at.data(), c, n, k, m); },
                   [&](auto& c) { ko::matmul_tn(a.data(), at.data(), c, n, k, m); }, k * m));
  EXPECT_TRUE(both([&](auto& c) { ks::matmul_nt(at.data(), bt.data(), c, n, m, k); },
                   [&](auto& c) { ko::matmul_nt(at.data(), bt.data(), c, n, m, k); }, n * k));

  const std::size_t rows = 300, dim = 40;
  const Tensor z = random_tensor({rows, dim}, rng), gd = random_tensor({rows, rows}, rng);
  EXPECT_TRUE(both([&](auto& d) { ks::pairwise_sq_dist(z.data(), d, rows, dim); },
                   [&](auto& d) { ko::pairwise_sq_dist(z.data(), d, rows, dim); }, rows * rows));
  EXPECT_TRUE(
      both([&](auto& dz) { ks::pairwise_sq_dist_backward(z.data(), gd.data(), dz, rows, dim); },
           [&](auto& dz) { ko::pairwise_sq_dist_backward(z.data(), gd.data(), dz, rows, dim); },
           rows * dim));

  std::vector<double> ys(rows * dim), ns(rows), yo(rows * dim), no(rows);
  ks::l2_normalize_rows(z.data(), ys, ns, rows, dim);
  ko::l2_normalize_rows(z.data(), yo, no, rows, dim);
  EXPECT_EQ(ys, yo);
  EXPECT_EQ(ns, no);
  const Tensor gz = random_tensor({rows, dim}, rng);
  EXPECT_TRUE(both([&](auto& dx) { ks::l2_normalize_backward(ys, ns, gz.data(), dx, rows, dim); },
                   [&](auto& dx) { ko::l2_normalize_backward(ys, ns, gz.data(), dx, rows, dim); },
                   rows * dim));
}

TEST(Kernels, PairwiseDistanceIsExactlySymmetricWithZeroDiagonal) {
  std::mt19937_64 rng(9);
  const Tensor z = random_tensor({20, 7}, rng, -100.0, 100.0);
  std::vector<double> d(400);
  kernels::omp::pairwise_sq_dist(z.data(), d, 20, 7);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(d[i * 20 + i], 0.0);
    for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(d[i * 20 + j], d[j * 20 + i]);
  }
}

}  // namespace
}  // namespace ssdg
