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

#include "ssdg/kernels.hpp"

namespace ssdg::kernels::serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t p = 0; p < k; ++p) {
    double* cp = c.data() + p * m;
    for (std::size_t j = 0; j < m; ++j) cp[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double aip = a[i * k + p];
      const double* bi = b.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += aip * bi[j];
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data() + i * m;
    for (std::size_t q = 0; q < k; ++q) {
      const double* bq = b.data() + q * m;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += ai[j] * bq[j];
      c[i * k + q] = acc;
    }
  }
}

void pairwise_sq_dist(std::span<const double> z, std::span<double> d, std::size_t n,
                      std::size_t dim) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = z[i * dim + c] - z[j * dim + c];
        acc += diff * diff;
      }
      d[i * n + j] = acc;
    }
  }
}

void pairwise_sq_dist_backward(std::span<const double> z, std::span<const double> g,
                               std::span<double> dz, std::size_t n, std::size_t dim) {
  for (std::size_t i = 0; i < n; ++i) {
    double* dzi = dz.data() + i * dim;
    for (std::size_t c = 0; c < dim; ++c) dzi[c] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = 2.0 * (g[i * n + j] + g[j * n + i]);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < dim; ++c) dzi[c] += w * (z[i * dim + c] - z[j * dim + c]);
    }
  }
}

void l2_normalize_rows(std::span<const double> x, std::span<double> y, std::span<double> norms,
                       std::size_t n, std::size_t dim) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) acc += x[i * dim + c] * x[i * dim + c];
    const double norm = std::sqrt(acc);
    norms[i] = norm;
    for (std::size_t c = 0; c < dim; ++c) y[i * dim + c] = x[i * dim + c] / norm;
  }
}

void l2_normalize_backward(std::span<const double> y, std::span<const double> norms,
                           std::span<const double> g, std::span<double> dx, std::size_t n,
                           std::size_t dim) {
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) dot += y[i * dim + c] * g[i * dim + c];
    for (std::size_t c = 0; c < dim; ++c) {
      dx[i * dim + c] = (g[i * dim + c] - y[i * dim + c] * dot) / norms[i];
    }
  }
}

}  // namespace ssdg::kernels::serial
