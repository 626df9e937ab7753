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
#include <span>

// Dense numeric kernels behind the autodiff ops. Each kernel exists twice:
// `serial` is the straightforward reference and `omp` distributes output rows
// over OpenMP threads. Every output element is accumulated in the same order
// by both, so their results are bit-identical for any thread count.
//
// Matrices are row-major spans; dimensions are passed explicitly.
namespace ssdg::kernels {

/// Work (in multiply-adds) below which the OpenMP kernels stay sequential.
inline constexpr std::size_t kParallelWorkThreshold = std::size_t{1} << 15;

namespace serial {

/// c(n x m) = a(n x k) * b(k x m)
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n, std::size_t k, std::size_t m);
/// c(k x m) = a(n x k)^T * b(n x m)
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t k, std::size_t m);
/// c(n x k) = a(n x m) * b(k x m)^T
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t m, std::size_t k);

/// d(n x n)(i, j) = sum_c (z(i, c) - z(j, c))^2
void pairwise_sq_dist(std::span<const double> z, std::span<double> d, std::size_t n,
                      std::size_t dim);
/// dz(i) = sum_j 2 (g(i, j) + g(j, i)) (z(i) - z(j))
void pairwise_sq_dist_backward(std::span<const double> z, std::span<const double> g,
                               std::span<double> dz, std::size_t n, std::size_t dim);

/// y(i) = x(i) / |x(i)|, norms(i) = |x(i)|. Does not check for zero rows.
void l2_normalize_rows(std::span<const double> x, std::span<double> y, std::span<double> norms,
                       std::size_t n, std::size_t dim);
/// dx(i) = (g(i) - y(i) <y(i), g(i)>) / norms(i)
void l2_normalize_backward(std::span<const double> y, std::span<const double> norms,
                           std::span<const double> g, std::span<double> dx, std::size_t n,
                           std::size_t dim);

}  // namespace serial

namespace omp {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t n, std::size_t k, std::size_t m);
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t k, std::size_t m);
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::size_t n, std::size_t m, std::size_t k);
void pairwise_sq_dist(std::span<const double> z, std::span<double> d, std::size_t n,
                      std::size_t dim);
void pairwise_sq_dist_backward(std::span<const double> z, std::span<const double> g,
                               std::span<double> dz, std::size_t n, std::size_t dim);
void l2_normalize_rows(std::span<const double> x, std::span<double> y, std::span<double> norms,
                       std::size_t n, std::size_t dim);
void l2_normalize_backward(std::span<const double> y, std::span<const double> norms,
                           std::span<const double> g, std::span<double> dx, std::size_t n,
                           std::size_t dim);

}  // namespace omp

}  // namespace ssdg::kernels
