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

#include "ssdg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>

#include "ssdg/io.hpp"

namespace ssdg {

namespace {

struct Counts {
  std::uint64_t real = 0;
  std::uint64_t fake = 0;
};

Counts class_counts(const ScoredSet& s) {
  Counts c;
  for (Cls l : s.labels) (l == Cls::kReal ? c.real : c.fake) += 1;
  return c;
}

// Fakes accepted and reals rejected at threshold t.
std::pair<std::uint64_t, std::uint64_t> error_counts(const ScoredSet& s, double t) {
  std::uint64_t fa = 0, fr = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool accepted = s.scores[i] >= t;
    if (s.labels[i] == Cls::kFake && accepted) ++fa;
    if (s.labels[i] == Cls::kReal && !accepted) ++fr;
  }
  return {fa, fr};
}

}  // namespace

ThresholdPolicy parse_threshold_policy(const std::string& s) {
  if (s == "eer-on-test") return {ThresholdKind::kEerOnTest, 0.0};
  const std::string prefix = "fixed:";
  if (s.rfind(prefix, 0) == 0) {
    return {ThresholdKind::kFixed, io::parse_double(s.substr(prefix.size()))};
  }
  throw ContractError("unknown threshold policy '" + s + "' (expected eer-on-test | fixed:<t>)");
}

std::string to_string(const ThresholdPolicy& p) {
  if (p.kind == ThresholdKind::kEerOnTest) return "eer-on-test";
  return "fixed:" + io::format_double(p.value);
}

void validate(const ScoredSet& s) {
  if (s.scores.size() != s.labels.size()) {
    throw ContractError("scored set: scores and labels differ in length");
  }
  const Counts c = class_counts(s);
  if (c.real == 0 || c.fake == 0)
    throw ContractError("scored set needs both real and fake samples");
  for (double v : s.scores) {
    if (std::isnan(v)) throw ContractError("scored set contains NaN");
  }
}

std::vector<RocPoint> roc_points(const ScoredSet& s) {
  validate(s);
  const Counts c = class_counts(s);
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });

  std::vector<RocPoint> roc{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = s.scores[order[i]];
    for (; i < order.size() && s.scores[order[i]] == score; ++i) {
      (s.labels[order[i]] == Cls::kReal ? tp : fp) += 1;
    }
    roc.push_back({static_cast<double>(fp) / static_cast<double>(c.fake),
                   static_cast<double>(tp) / static_cast<double>(c.real), score});
  }
  return roc;
}

double auc(const ScoredSet& s) {
  validate(s);
  const Counts c = class_counts(s);
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });
  // Twice the area in units of (1 / n_fake) x (1 / n_real).
  std::uint64_t twice_area = 0;
  std::uint64_t tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = s.scores[order[i]];
    std::uint64_t dtp = 0, dfp = 0;
    for (; i < order.size() && s.scores[order[i]] == score; ++i) {
      (s.labels[order[i]] == Cls::kReal ? dtp : dfp) += 1;
    }
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
  }
  return static_cast<double>(twice_area) /
         (2.0 * static_cast<double>(c.real) * static_cast<double>(c.fake));
}

ErrorRates error_rates(const ScoredSet& s, double threshold) {
  validate(s);
  const Counts c = class_counts(s);
  const auto [fa, fr] = error_counts(s, threshold);
  return {static_cast<double>(fa) / static_cast<double>(c.fake),
          static_cast<double>(fr) / static_cast<double>(c.real)};
}

EerPoint eer_threshold(const ScoredSet& s) {
  validate(s);
  const Counts c = class_counts(s);
  std::vector<double> candidates = s.scores;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  // |FAR - FRR| scaled by n_real * n_fake so comparisons are exact.
  std::uint64_t best_gap = std::numeric_limits<std::uint64_t>::max();
  double best_t = candidates.front();
  for (double t : candidates) {
    const auto [fa, fr] = error_counts(s, t);
    const std::uint64_t a = fa * c.real, b = fr * c.fake;
    const std::uint64_t gap = a > b ? a - b : b - a;
    if (gap < best_gap) {
      best_gap = gap;
      best_t = t;
    }
  }
  EerPoint p;
  p.threshold = best_t;
  p.rates = error_rates(s, best_t);
  p.eer = 0.5 * (p.rates.far + p.rates.frr);
  return p;
}

double hter(const ScoredSet& s, double threshold) {
  const ErrorRates r = error_rates(s, threshold);
  return 0.5 * (r.far + r.frr);
}

EvalReport evaluate(const ScoredSet& s, const ThresholdPolicy& policy) {
  EvalReport r;
  const Counts c = class_counts(s);
  r.roc = roc_points(s);
  r.auc = auc(s);
  const EerPoint e = eer_threshold(s);
  r.eer = e.eer;
  r.threshold = policy.kind == ThresholdKind::kEerOnTest ? e.threshold : policy.value;
  r.rates = error_rates(s, r.threshold);
  r.hter = 0.5 * (r.rates.far + r.rates.frr);
  r.n_real = c.real;
  r.n_fake = c.fake;
  return r;
}

void write_report(const EvalReport& r, const ThresholdPolicy& policy, std::ostream& os) {
  os << "auc=" << io::format_double(r.auc) << '\n'
     << "eer=" << io::format_double(r.eer) << '\n'
     << "threshold=" << io::format_double(r.threshold) << '\n'
     << "threshold_policy=" << to_string(policy) << '\n'
     << "hter=" << io::format_double(r.hter) << '\n'
     << "far=" << io::format_double(r.rates.far) << '\n'
     << "frr=" << io::format_double(r.rates.frr) << '\n'
     << "n_real=" << r.n_real << '\n'
     << "n_fake=" << r.n_fake << '\n';
}

void write_roc_csv(const std::vector<RocPoint>& roc, std::ostream& os) {
  os << "far,tpr,threshold\n";
  for (const RocPoint& p : roc) {
    os << io::format_double(p.far) << ',' << io::format_double(p.tpr) << ','
       << io::format_double(p.threshold) << '\n';
  }
}

}  // namespace ssdg
