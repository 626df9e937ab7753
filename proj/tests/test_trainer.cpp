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
#include <sstream>

#include "ssdg/domain_synth.hpp"
#include "ssdg/trainer.hpp"

namespace ssdg {
namespace {

Dataset small_world(std::uint64_t seed) {
  GeometryConfig gc;
  gc.per_class_count = 60;
  return generate(make_geometry(gc, seed), seed);
}

TrainConfig quick_config(std::size_t iters) {
  TrainConfig cfg;
  cfg.total_iters = iters;
  cfg.batch_size = 12;
  cfg.source_domains = {0, 1, 2};
  cfg.model.hidden = 16;
  cfg.model.embedding = 8;
  cfg.model.disc_hidden = 8;
  return cfg;
}

TEST(Sgd, SingleStepArithmetic) {
  std::vector<double> p{1.0}, v{0.0};
  const std::vector<double> g{0.5};
  sgd_step(p, g, v, {0.1, 0.9, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.95);
  EXPECT_DOUBLE_EQ(v[0], 0.5);
}

TEST(Sgd, TwoStepsWithMomentumAndDecay) {
  const double lr = 0.05, mu = 0.9, wd = 0.01;
  std::vector<double> p{2.0, -1.0}, v{0.0, 0.0};
  const std::vector<double> g1{0.3, -0.2}, g2{-0.1, 0.4};
  // Reference recurrence written out per coordinate.
  double rp[2] = {2.0, -1.0}, rv[2] = {0.0, 0.0};
  for (const auto* g : {&g1, &g2}) {
    sgd_step(p, *g, v, {lr, mu, wd});
    for (int i = 0; i < 2; ++i) {
      rv[i] = mu * rv[i] + (*g)[i] + wd * rp[i];
      rp[i] -= lr * rv[i];
    }
  }
  EXPECT_NEAR(p[0], rp[0], 1e-12);
  EXPECT_NEAR(p[1], rp[1], 1e-12);
  EXPECT_NEAR(v[0], rv[0], 1e-12);
}

TEST(Sgd, RejectsNonFiniteGradient) {
  std::vector<double> p{1.0}, v{0.0};
  const std::vector<double> g{std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(sgd_step(p, g, v, {0.1, 0.9, 0.0}), NonFiniteLossError);
}

TEST(Optimizer, SkipsDecayOnClassifierWeights) {
  ModelConfig mc;
  mc.input_dim = 4;
  ModelParams p = init_params(mc, 1);
  const ModelParams before = p;
  OptimizerState opt(p);
  std::vector<Tensor> zero;
  for (const Parameter* q : p.all()) zero.push_back(Tensor::zeros_like(q->value));
  opt.step(p, zero, 0.1, 0.9, 0.5);
  // Zero gradient: only decayed parameters move.
  EXPECT_EQ(p.classifier.w.value, before.classifier.w.value);
  EXPECT_NE(p.generator.w1.value, before.generator.w1.value);
}

TEST(Mode, ParseRoundTrip) {
  EXPECT_EQ(parse_mode("bdg"), Mode::kBdg);
  EXPECT_EQ(parse_mode(to_string(Mode::kSsdg)), Mode::kSsdg);
  EXPECT_THROW(parse_mode("dg"), ContractError);
}

TEST(Train, DeterministicInSeed) {
  const Dataset ds = small_world(1);
  const TrainConfig cfg = quick_config(40);
  const TrainResult a = train(cfg, ds), b = train(cfg, ds);
  const auto pa = a.params.all(), pb = b.params.all();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  std::ostringstream ha, hb;
  write_history_csv(a.history, ha);
  write_history_csv(b.history, hb);
  EXPECT_EQ(ha.str(), hb.str());

  TrainConfig other = cfg;
  other.seed = 2;
  EXPECT_NE(train(other, ds).params.generator.w1.value, a.params.generator.w1.value);
}

TEST(Train, ZeroIterationsReturnsInitialParameters) {
  const Dataset ds = small_world(1);
  const TrainConfig cfg = quick_config(0);
  const TrainResult r = train(cfg, ds);
  EXPECT_TRUE(r.history.records.empty());
  EXPECT_EQ(r.params.generator.w1.value,
            init_params(resolve_model_config(cfg, ds), cfg.seed).generator.w1.value);
}

TEST(Train, HistoryRecordsScheduleAndParts) {
  const Dataset ds = small_world(2);
  const TrainResult r = train(quick_config(20), ds);
  ASSERT_EQ(r.history.records.size(), 20u);
  EXPECT_EQ(r.history.records.front().lambda, 0.0);
  for (const IterRecord& rec : r.history.records) {
    EXPECT_NEAR(rec.l_total, rec.l_cls + rec.l_ada + rec.l_astrip, 1e-12);
  }
  std::ostringstream os;
  write_history_csv(r.history, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "iter,lambda,l_cls,l_ada,l_astrip,l_total");
}

TEST(Train, ClassifierColumnsStayUnit) {
  const Dataset ds = small_world(3);
  double worst = 0.0;
  train(quick_config(50), ds, [&worst](std::size_t, const ModelParams& p) {
    const Tensor& w = p.classifier.w.value;
    for (std::size_t c = 0; c < w.cols(); ++c) {
      double sq = 0.0;
      for (std::size_t r = 0; r < w.rows(); ++r) sq += w(r, c) * w(r, c);
      worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
    }
  });
  EXPECT_LT(worst, 1e-9);
}

TEST(Train, FitsTheSourceDomains) {
  const Dataset ds = small_world(4);
  TrainConfig cfg = quick_config(600);
  const TrainResult r = train(cfg, ds);
  const std::vector<int> sources{0, 1, 2};
  const auto src = select_domains(ds.samples, sources);
  const auto scores = real_scores(r.params, src);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    correct += (scores[i] >= 0.5) == (src[i].cls == Cls::kReal) ? 1 : 0;
  }
  EXPECT_GT(static_cast<double>(correct) / static_cast<double>(src.size()), 0.95);
}

TEST(Train, AblationsAndBaselineRun) {
  const Dataset ds = small_world(5);
  for (int variant = 0; variant < 4; ++variant) {
    TrainConfig cfg = quick_config(30);
    cfg.components.ssad = variant != 0;
    cfg.components.triplet = variant != 1;
    cfg.components.norm = variant != 2;
    const TrainResult r = variant == 3 ? train_bdg(cfg, ds) : train(cfg, ds);
    EXPECT_EQ(r.history.records.size(), 30u);
    if (!cfg.components.ssad) EXPECT_EQ(r.history.records.back().l_ada, 0.0);
    if (!cfg.components.triplet) EXPECT_EQ(r.history.records.back().l_astrip, 0.0);
  }
}

TEST(Train, RejectsInvalidConfigs) {
  const Dataset ds = small_world(1);
  TrainConfig cfg = quick_config(10);
  cfg.batch_size = 10;
  EXPECT_THROW(train(cfg, ds), ContractError);
  cfg = quick_config(10);
  cfg.source_domains = {0, 9};
  EXPECT_THROW(train(cfg, ds), ContractError);
  cfg = quick_config(10);
  cfg.lr = -1.0;
  EXPECT_THROW(train(cfg, ds), ContractError);
}

TEST(Train, DivergenceIsReportedWithHistory) {
  const Dataset ds = small_world(1);
  TrainConfig cfg = quick_config(200);
  cfg.lr = 1e6;
  cfg.components.norm = false;
  try {
    train(cfg, ds);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_LT(e.history().records.size(), 200u);
  }
}

}  // namespace
}  // namespace ssdg
