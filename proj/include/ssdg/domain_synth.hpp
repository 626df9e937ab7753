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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ssdg/errors.hpp"

namespace ssdg {

enum class Cls : int { kFake = 0, kReal = 1 };

inline int to_int(Cls c) { return static_cast<int>(c); }

struct Sample {
  std::vector<double> features;
  Cls cls = Cls::kFake;
  int domain = 0;
};

/// Class-conditional Gaussian parameters of one domain. Fake samples pick one
/// of `fake_means` (an attack mode) uniformly.
struct DomainSpec {
  int domain_id = 0;
  std::vector<double> real_mean;
  double real_scale = 1.0;
  std::vector<std::vector<double>> fake_means;
  double fake_scale = 1.0;
};

/// Full description of a multi-domain world. `shift_real` bounds how far any
/// domain's real mean may sit from `real_center`; `sep_fake` is the minimum
/// distance between fake modes of different domains. Requires
/// sep_fake > shift_real.
struct DatasetSpec {
  std::size_t dim = 16;
  std::vector<double> real_center;
  double shift_real = 0.3;
  double sep_fake = 3.0;
  std::vector<DomainSpec> domains;
  /// Samples per class per domain, parallel to `domains`.
  std::vector<std::size_t> per_domain_counts;
};

struct Dataset {
  std::vector<Sample> samples;
  int n_domains = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
};

/// Checks the DatasetSpec invariants; throws ContractError describing the
/// first violation.
void validate(const DatasetSpec& spec);

/// Draws Gaussian samples for every domain and class. Deterministic in
/// (spec, seed).
Dataset generate(const DatasetSpec& spec, std::uint64_t seed);

/// Knobs for the default synthetic world.
struct GeometryConfig {
  std::size_t dim = 16;
  int n_domains = 4;
  double shift_real = 0.3;
  double sep_fake = 3.0;
  double fake_radius = 6.0;
  int fake_modes = 3;
  double real_scale = 1.0;
  double fake_scale = 1.0;
  std::size_t per_class_count = 200;
  /// Draw the world (means) from this seed instead of the run seed, so runs
  /// with different seeds share one geometry.
  std::optional<std::uint64_t> geometry_seed;
};

/// Random world satisfying the DatasetSpec invariants: real means jittered within
/// shift_real of the origin, fake modes pushed out to `fake_radius` along
/// mutually distant random directions. Deterministic in `seed`.
DatasetSpec make_geometry(const GeometryConfig& cfg, std::uint64_t seed);

/// Asymmetric triplet categories: 0 for every real sample, j (1-based ordinal
/// of the sample's domain in `source_domains`) for fakes. Throws ContractError
/// for a sample outside the sources.
std::vector<int> asymmetric_relabel(std::span<const Sample> samples,
                                    std::span<const int> source_domains);

/// Two-category labels used by the symmetric baseline: real 0, fake 1.
std::vector<int> binary_relabel(std::span<const Sample> samples);

/// Ordinal (0-based) of each sample's domain within `source_domains`.
std::vector<int> domain_ordinals(std::span<const Sample> samples,
                                 std::span<const int> source_domains);

/// Draws batch_size / (2 N) samples of each class from each source domain,
/// with replacement, then shuffles. Holds its own RNG stream.
class BalancedBatchSampler {
 public:
  BalancedBatchSampler(const Dataset& ds, std::vector<int> source_domains, std::size_t batch_size,
                       std::uint64_t seed);

  /// Indices into the dataset's sample list.
  std::vector<std::size_t> next_indices();
  std::vector<Sample> next();

  std::size_t per_group() const { return per_group_; }

 private:
  const Dataset* ds_;
  std::vector<int> sources_;
  std::size_t per_group_;
  // pools_[2 * ordinal + cls]
  std::vector<std::vector<std::size_t>> pools_;
  std::mt19937_64 rng_;
};

/// Only the samples whose domain is listed.
std::vector<Sample> select_domains(std::span<const Sample> samples, std::span<const int> domains);

/// Mean pairwise Euclidean distance between the per-domain centroids of the
/// rows with class `cls`. `rows` is (n x dim) row-major. Domains without any
/// such row are skipped; fewer than two centroids yields 0.
double centroid_spread(std::span<const double> rows, std::size_t dim, std::span<const Cls> cls,
                       std::span<const int> domains, Cls which);

double centroid_spread(std::span<const Sample> samples, Cls which);

/// CSV with header f0..f{d-1},cls,domain and shortest round-trip doubles.
void write_csv(const Dataset& ds, std::ostream& os);
void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(std::istream& is);
Dataset read_csv(const std::string& path);

}  // namespace ssdg
