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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ssdg/kernels.hpp"

namespace {

namespace ks = ssdg::kernels::serial;
namespace ko = ssdg::kernels::omp;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

template <auto Kernel>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1), b = random_values(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, n, n, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}

template <auto Kernel>
void BM_PairwiseSqDist(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 32;
  const auto z = random_values(n * dim, 3);
  std::vector<double> d(n * n);
  for (auto _ : state) {
    Kernel(z, d, n, dim);
    benchmark::DoNotOptimize(d.data());
  }
}

template <auto Kernel>
void BM_PairwiseBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 32;
  const auto z = random_values(n * dim, 4), g = random_values(n * n, 5);
  std::vector<double> dz(n * dim);
  for (auto _ : state) {
    Kernel(z, g, dz, n, dim);
    benchmark::DoNotOptimize(dz.data());
  }
}

template <auto Kernel>
void BM_L2Normalize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 512;
  const auto x = random_values(n * dim, 6);
  std::vector<double> y(n * dim), norms(n);
  for (auto _ : state) {
    Kernel(x, y, norms, n, dim);
    benchmark::DoNotOptimize(y.data());
  }
}

BENCHMARK(BM_Matmul<ks::matmul>)->Name("matmul/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_Matmul<ko::matmul>)->Name("matmul/omp")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_PairwiseSqDist<ks::pairwise_sq_dist>)
    ->Name("pairwise_sq_dist/serial")
    ->Range(24, 1024);
BENCHMARK(BM_PairwiseSqDist<ko::pairwise_sq_dist>)->Name("pairwise_sq_dist/omp")->Range(24, 1024);
BENCHMARK(BM_PairwiseBackward<ks::pairwise_sq_dist_backward>)
    ->Name("pairwise_sq_dist_backward/serial")
    ->Range(24, 1024);
BENCHMARK(BM_PairwiseBackward<ko::pairwise_sq_dist_backward>)
    ->Name("pairwise_sq_dist_backward/omp")
    ->Range(24, 1024);
BENCHMARK(BM_L2Normalize<ks::l2_normalize_rows>)->Name("l2_normalize/serial")->Range(24, 4096);
BENCHMARK(BM_L2Normalize<ko::l2_normalize_rows>)->Name("l2_normalize/omp")->Range(24, 4096);

}  // namespace

BENCHMARK_MAIN();
