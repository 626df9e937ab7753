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

#include <iosfwd>
#include <string>
#include <vector>

#include "ssdg/domain_synth.hpp"

namespace ssdg {

/// Real-class scores with ground truth. A sample is accepted as real when its
/// score is >= the threshold.
struct ScoredSet {
  std::vector<double> scores;
  std::vector<Cls> labels;
};

struct RocPoint {
  double far = 0.0;
  double tpr = 0.0;
  /// Acceptance threshold producing this point; +inf for the (0, 0) origin.
  double threshold = 0.0;
};

struct ErrorRates {
  double far = 0.0;
  double frr = 0.0;
};

struct EerPoint {
  double eer = 0.0;
  double threshold = 0.0;
  ErrorRates rates;
};

enum class ThresholdKind { kEerOnTest, kFixed };

struct ThresholdPolicy {
  ThresholdKind kind = ThresholdKind::kEerOnTest;
  double value = 0.5;
};

/// "eer-on-test" or "fixed:<value>".
ThresholdPolicy parse_threshold_policy(const std::string& s);
std::string to_string(const ThresholdPolicy& p);

struct EvalReport {
  double auc = 0.0;
  double eer = 0.0;
  double threshold = 0.0;
  double hter = 0.0;
  ErrorRates rates;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::vector<RocPoint> roc;
};

/// Both functions below throw ContractError unless both classes are present
/// and the lengths agree.
void validate(const ScoredSet& s);

/// (0, 0) followed by one point per distinct score, descending; the last
/// point is always (1, 1).
std::vector<RocPoint> roc_points(const ScoredSet& s);

/// Trapezoidal area under roc_points. Ties count one half, so this equals the
/// Mann-Whitney statistic; it is computed from integer counts and matches it
/// exactly.
double auc(const ScoredSet& s);

ErrorRates error_rates(const ScoredSet& s, double threshold);

/// Threshold among {distinct scores, +inf} minimizing |FAR - FRR|, lowest
/// threshold on ties; eer = (FAR + FRR) / 2 there.
EerPoint eer_threshold(const ScoredSet& s);

double hter(const ScoredSet& s, double threshold);

EvalReport evaluate(const ScoredSet& s, const ThresholdPolicy& policy);

/// key=value lines.
void write_report(const EvalReport& r, const ThresholdPolicy& policy, std::ostream& os);
/// far,tpr,threshold
void write_roc_csv(const std::vector<RocPoint>& roc, std::ostream& os);

}  // namespace ssdg
