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
#include <map>
#include <set>
#include <sstream>

#include "ssdg/domain_synth.hpp"

namespace ssdg {
namespace {

DatasetSpec two_domain_spec() {
  DatasetSpec spec;
  spec.dim = 2;
  spec.shift_real = 0.5;
  spec.sep_fake = 3.0;
  spec.domains = {
      {0, {0.1, 0.0}, 1.0, {{5.0, 0.0}}, 1.0},
      {1, {0.0, -0.2}, 1.0, {{0.0, 5.0}, {-5.0, 0.0}}, 1.0},
  };
  spec.per_domain_counts = {10, 20};
  return spec;
}

TEST(Generate, ZeroScalePlacesEverySampleOnItsMean) {
  DatasetSpec spec = two_domain_spec();
  for (auto& d : spec.domains) d.real_scale = d.fake_scale = 0.0;
  const Dataset ds = generate(spec, 1);
  ASSERT_EQ(ds.samples.size(), 60u);
  for (const Sample& s : ds.samples) {
    const DomainSpec& d = spec.domains[s.domain];
    if (s.cls == Cls::kReal) {
      EXPECT_EQ(s.features, d.real_mean);
    } else {
      EXPECT_TRUE(std::find(d.fake_means.begin(), d.fake_means.end(), s.features) !=
                  d.fake_means.end());
    }
  }
}

TEST(Generate, CountsPerClassAndDomain) {
  const Dataset ds = generate(two_domain_spec(), 4);
  std::map<std::pair<int, Cls>, int> counts;
  for (const Sample& s : ds.samples) ++counts[{s.domain, s.cls}];
  EXPECT_EQ((counts[{0, Cls::kReal}]), 10);
  EXPECT_EQ((counts[{0, Cls::kFake}]), 10);
  EXPECT_EQ((counts[{1, Cls::kReal}]), 20);
  EXPECT_EQ((counts[{1, Cls::kFake}]), 20);
  EXPECT_EQ(ds.n_domains, 2);
  EXPECT_EQ(ds.dim, 2u);
}

TEST(Generate, DeterministicInSeed) {
  const DatasetSpec spec = two_domain_spec();
  const Dataset a = generate(spec, 9), b = generate(spec, 9), c = generate(spec, 10);
  std::ostringstream sa, sb, sc;
  write_csv(a, sa);
  write_csv(b, sb);
  write_csv(c, sc);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Generate, SampleMeansConcentrate) {
  DatasetSpec spec = two_domain_spec();
  spec.per_domain_counts = {20000, 20000};
  const Dataset ds = generate(spec, 2);
  std::vector<double> sum(2, 0.0);
  int n = 0;
  for (const Sample& s : ds.samples) {
    if (s.domain != 0 || s.cls != Cls::kReal) continue;
    sum[0] += s.features[0];
    sum[1] += s.features[1];
    ++n;
  }
  // Standard error is 1/sqrt(20000) ~ 0.007; allow five of them.
  EXPECT_NEAR(sum[0] / n, 0.1, 0.035);
  EXPECT_NEAR(sum[1] / n, 0.0, 0.035);
}

TEST(Validate, RejectsBrokenSpecs) {
  DatasetSpec spec = two_domain_spec();
  EXPECT_NO_THROW(validate(spec));

  auto expect_reject = [](DatasetSpec s) { EXPECT_THROW(validate(s), ContractError); };
  DatasetSpec s = spec;
  s.domains[1].domain_id = 5;
  expect_reject(s);
  s = spec;
  s.domains[0].real_mean = {0.6, 0.0};
  expect_reject(s);
  s = spec;
  s.domains[1].fake_means[0] = {4.0, 1.0};
  expect_reject(s);
  s = spec;
  s.sep_fake = 0.4;
  expect_reject(s);
  s = spec;
  s.domains[0].real_scale = -1.0;
  expect_reject(s);
  s = spec;
  s.per_domain_counts = {10};
  expect_reject(s);
  s = spec;
  s.per_domain_counts = {10, 0};
  expect_reject(s);
  s = spec;
  s.dim = 1;
  expect_reject(s);
}

TEST(Geometry, SatisfiesInvariantsForManySeeds) {
  GeometryConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DatasetSpec spec = make_geometry(cfg, seed);
    EXPECT_NO_THROW(validate(spec));
    EXPECT_EQ(spec.domains.size(), 4u);
    for (const DomainSpec& d : spec.domains) {
      EXPECT_EQ(d.fake_means.size(), static_cast<std::size_t>(cfg.fake_modes));
    }
  }
}

TEST(Geometry, RealSpreadBelowFakeSpreadInInputSpace) {
  GeometryConfig cfg;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset ds = generate(make_geometry(cfg, seed), seed);
    EXPECT_LT(centroid_spread(ds.samples, Cls::kReal), centroid_spread(ds.samples, Cls::kFake));
  }
}

TEST(Relabel, AsymmetricCategories) {
  const std::vector<int> sources{0, 1, 2};
  const std::vector<Sample> samples{{{}, Cls::kFake, 2},
                                    {{}, Cls::kReal, 2},
                                    {{}, Cls::kFake, 0},
                                    {{}, Cls::kReal, 0},
                                    {{}, Cls::kFake, 1}};
  EXPECT_EQ(asymmetric_relabel(samples, sources), (std::vector<int>{3, 0, 1, 0, 2}));
  EXPECT_EQ(binary_relabel(samples), (std::vector<int>{1, 0, 1, 0, 1}));
  EXPECT_EQ(domain_ordinals(samples, sources), (std::vector<int>{2, 2, 0, 0, 1}));

  // Ordinals follow the order of the source list, not the raw ids.
  const std::vector<int> shuffled{3, 1};
  const std::vector<Sample> other{{{}, Cls::kFake, 3}, {{}, Cls::kFake, 1}};
  EXPECT_EQ(asymmetric_relabel(other, shuffled), (std::vector<int>{1, 2}));

  const std::vector<Sample> stray{{{}, Cls::kReal, 3}};
  EXPECT_THROW(asymmetric_relabel(stray, sources), ContractError);
}

TEST(Sampler, BalancedGroupsEveryBatch) {
  GeometryConfig cfg;
  cfg.per_class_count = 30;
  const Dataset ds = generate(make_geometry(cfg, 3), 3);
  BalancedBatchSampler sampler(ds, {0, 1, 2}, 24, 77);
  EXPECT_EQ(sampler.per_group(), 4u);
  for (int it = 0; it < 50; ++it) {
    std::map<std::pair<int, Cls>, int> counts;
    for (const Sample& s : sampler.next()) ++counts[{s.domain, s.cls}];
    ASSERT_EQ(counts.size(), 6u);
    for (const auto& [key, n] : counts) EXPECT_EQ(n, 4);
  }
}

TEST(Sampler, CoversEveryPoolEventually) {
  GeometryConfig cfg;
  cfg.per_class_count = 10;
  const Dataset ds = generate(make_geometry(cfg, 3), 3);
  BalancedBatchSampler sampler(ds, {0, 1, 2}, 24, 5);
  std::set<std::size_t> seen;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i : sampler.next_indices()) seen.insert(i);
  }
  // Every source sample (3 domains x 2 classes x 10) shows up; no target sample does.
  EXPECT_EQ(seen.size(), 60u);
  for (std::size_t i : seen) EXPECT_NE(ds.samples[i].domain, 3);
}

TEST(Sampler, SameSeedSameStream) {
  const Dataset ds = generate(make_geometry(GeometryConfig{}, 1), 1);
  BalancedBatchSampler a(ds, {0, 1, 2}, 12, 8), b(ds, {0, 1, 2}, 12, 8);
  for (int it = 0; it < 10; ++it) EXPECT_EQ(a.next_indices(), b.next_indices());
}

TEST(Sampler, RejectsBadSetups) {
  const Dataset ds = generate(make_geometry(GeometryConfig{}, 1), 1);
  EXPECT_THROW(BalancedBatchSampler(ds, {0, 1, 2}, 25, 1), ContractError);
  EXPECT_THROW(BalancedBatchSampler(ds, {0, 1, 2}, 0, 1), ContractError);
  EXPECT_THROW(BalancedBatchSampler(ds, {}, 12, 1), ContractError);
  EXPECT_THROW(BalancedBatchSampler(ds, {0, 7}, 12, 1), ContractError);
}

TEST(CentroidSpread, HandCase) {
  // Real centroids (0,0), (3,4); fake centroids (0,0), (6,8), (0,0).
  const std::vector<Sample> samples{{{-1, 0}, Cls::kReal, 0}, {{1, 0}, Cls::kReal, 0},
                                    {{3, 4}, Cls::kReal, 1},  {{0, 0}, Cls::kFake, 0},
                                    {{6, 8}, Cls::kFake, 1},  {{0, 0}, Cls::kFake, 2}};
  EXPECT_DOUBLE_EQ(centroid_spread(samples, Cls::kReal), 5.0);
  EXPECT_DOUBLE_EQ(centroid_spread(samples, Cls::kFake), (10.0 + 0.0 + 10.0) / 3.0);
}

TEST(Csv, RoundTripIsExact) {
  const Dataset ds = generate(make_geometry(GeometryConfig{}, 4), 4);
  std::stringstream ss;
  write_csv(ds, ss);
  const Dataset back = read_csv(ss);
  ASSERT_EQ(back.samples.size(), ds.samples.size());
  EXPECT_EQ(back.dim, ds.dim);
  EXPECT_EQ(back.n_domains, ds.n_domains);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    EXPECT_EQ(back.samples[i].features, ds.samples[i].features);
    EXPECT_EQ(back.samples[i].cls, ds.samples[i].cls);
    EXPECT_EQ(back.samples[i].domain, ds.samples[i].domain);
  }
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("a,b,cls,domain\n1,2,0,0\n");
  EXPECT_THROW(read_csv(bad_header), std::runtime_error);
  std::istringstream short_row("f0,f1,cls,domain\n1,2,0\n");
  EXPECT_THROW(read_csv(short_row), std::runtime_error);
  std::istringstream bad_cls("f0,f1,cls,domain\n1,2,7,0\n");
  EXPECT_THROW(read_csv(bad_cls), std::runtime_error);
  std::istringstream bad_num("f0,f1,cls,domain\n1,x,0,0\n");
  EXPECT_THROW(read_csv(bad_num), std::invalid_argument);
}

}  // namespace
}  // namespace ssdg
