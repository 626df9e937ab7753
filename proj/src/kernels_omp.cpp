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

#include <cmath>
#include <cstddef>

#include "ssdg/kernels.hpp"

namespace ssdg::kernels::omp {

namespace {
using Index = std::ptrdiff_t;

bool worth_parallel(std::size_t work) { return work >= kParallelWorkThreshold; }
}  // namespace

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n, std::size_t k, std::size_t m) {
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * k * m))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* ci = pc + i * m;
    for (std::size_t j = 0; j < m; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      const double* bp = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t k, std::size_t m) {
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * k * m))
  for (Index pp = 0; pp < static_cast<Index>(k); ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    double* cp = pc + p * m;
    for (std::size_t j = 0; j < m; ++j) cp[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double aip = pa[i * k + p];
      const double* bi = pb + i * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += aip * bi[j];
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t m, std::size_t k) {
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * k * m))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* ai = pa + i * m;
    for (std::size_t q = 0; q < k; ++q) {
      const double* bq = pb + q * m;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += ai[j] * bq[j];
      pc[i * k + q] = acc;
    }
  }
}

void pairwise_sq_dist(std::span<const double> z, std::span<double> d, std::size_t n,
                      std::size_t dim) {
  const double* pz = z.data();
  double* pd = d.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * n * dim))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = pz[i * dim + c] - pz[j * dim + c];
        acc += diff * diff;
      }
      pd[i * n + j] = acc;
    }
  }
}

void pairwise_sq_dist_backward(std::span<const double> z, std::span<const double> g,
                               std::span<double> dz, std::size_t n, std::size_t dim) {
  const double* pz = z.data();
  const double* pg = g.data();
  double* pdz = dz.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * n * dim))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* dzi = pdz + i * dim;
    for (std::size_t c = 0; c < dim; ++c) dzi[c] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = 2.0 * (pg[i * n + j] + pg[j * n + i]);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < dim; ++c) dzi[c] += w * (pz[i * dim + c] - pz[j * dim + c]);
    }
  }
}

void l2_normalize_rows(std::span<const double> x, std::span<double> y, std::span<double> norms,
                       std::size_t n, std::size_t dim) {
  const double* px = x.data();
  double* py = y.data();
  double* pn = norms.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * dim))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) acc += px[i * dim + c] * px[i * dim + c];
    const double norm = std::sqrt(acc);
    pn[i] = norm;
    for (std::size_t c = 0; c < dim; ++c) py[i * dim + c] = px[i * dim + c] / norm;
  }
}

void l2_normalize_backward(std::span<const double> y, std::span<const double> norms,
                           std::span<const double> g, std::span<double> dx, std::size_t n,
                           std::size_t dim) {
  const double* py = y.data();
  const double* pn = norms.data();
  const double* pg = g.data();
  double* pdx = dx.data();
#pragma omp parallel for schedule(static) if (worth_parallel(n * dim))
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) dot += py[i * dim + c] * pg[i * dim + c];
    for (std::size_t c = 0; c < dim; ++c) {
      pdx[i * dim + c] = (pg[i * dim + c] - py[i * dim + c] * dot) / pn[i];
    }
  }
}

}  // namespace ssdg::kernels::omp
