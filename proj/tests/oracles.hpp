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

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. Each one is written from the definition, without
// reusing library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "ssdg/domain_synth.hpp"
#include "ssdg/losses.hpp"
#include "ssdg/metrics.hpp"

namespace ssdg::testing {

inline double sq_dist(const std::vector<std::vector<double>>& z, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < z[i].size(); ++c) {
    const double diff = z[i][c] - z[j][c];
    s += diff * diff;
  }
  return s;
}

/// Triple loop over (anchor, positive, negative). Batch-hard keeps the worst
/// hinge per anchor, which equals the hinge at the farthest positive and the
/// nearest negative; "all" sums every hinge of the anchor.
inline double brute_force_triplet(const std::vector<std::vector<double>>& z,
                                  const std::vector<int>& labels, double alpha, Mining mining) {
  const std::size_t n = z.size();
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t a = 0; a < n; ++a) {
    bool owns = false;
    double worst = 0.0;
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (p == a || labels[p] != labels[a]) continue;
      for (std::size_t q = 0; q < n; ++q) {
        if (labels[q] == labels[a]) continue;
        const double h = std::max(0.0, sq_dist(z, a, p) - sq_dist(z, a, q) + alpha);
        worst = owns ? std::max(worst, h) : h;
        sum += h;
        owns = true;
      }
    }
    if (!owns) continue;
    ++anchors;
    total += mining == Mining::kBatchHard ? worst : sum;
  }
  return anchors == 0 ? 0.0 : total / static_cast<double>(anchors);
}

/// Pair counting over every (real, fake) pair, ties worth one half.
inline double mann_whitney(const ScoredSet& s) {
  std::uint64_t twice = 0, n_real = 0, n_fake = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.labels[i] == Cls::kReal)
      ++n_real;
    else
      ++n_fake;
    if (s.labels[i] != Cls::kReal) continue;
    for (std::size_t j = 0; j < s.scores.size(); ++j) {
      if (s.labels[j] != Cls::kFake) continue;
      if (s.scores[i] > s.scores[j])
        twice += 2;
      else if (s.scores[i] == s.scores[j])
        twice += 1;
    }
  }
  return static_cast<double>(twice) /
         (2.0 * static_cast<double>(n_real) * static_cast<double>(n_fake));
}

/// Tries every distinct score and +inf as the acceptance threshold and
/// keeps the one with the smallest |FAR - FRR| (lowest threshold on ties).
inline double enumerate_eer_threshold(const ScoredSet& s) {
  std::vector<double> cands = s.scores;
  cands.push_back(std::numeric_limits<double>::infinity());
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::int64_t n_real = 0, n_fake = 0;
  for (Cls c : s.labels) (c == Cls::kReal ? n_real : n_fake) += 1;
  double best_t = cands.front();
  std::int64_t best_gap = -1;
  for (double t : cands) {
    std::int64_t fa = 0, fr = 0;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      if (s.labels[i] == Cls::kFake && s.scores[i] >= t) ++fa;
      if (s.labels[i] == Cls::kReal && s.scores[i] < t) ++fr;
    }
    // |fa / n_fake - fr / n_real| scaled by n_fake n_real.
    const std::int64_t gap = std::llabs(fa * n_real - fr * n_fake);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace ssdg::testing
