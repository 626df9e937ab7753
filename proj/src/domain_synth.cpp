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

#include "ssdg/domain_synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ssdg/io.hpp"

namespace ssdg {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (double& x : v) x /= norm;
  return v;
}

int ordinal_of(std::span<const int> sources, int domain) {
  const auto it = std::find(sources.begin(), sources.end(), domain);
  if (it == sources.end()) {
    throw ContractError("sample from domain " + std::to_string(domain) +
                        " is not in the source domain list");
  }
  return static_cast<int>(it - sources.begin());
}

}  // namespace

void validate(const DatasetSpec& spec) {
  if (spec.dim < 2) throw ContractError("dataset dim must be >= 2");
  if (spec.domains.empty()) throw ContractError("dataset needs at least one domain");
  if (spec.per_domain_counts.size() != spec.domains.size()) {
    throw ContractError("per_domain_counts must have one entry per domain");
  }
  if (!(spec.sep_fake > spec.shift_real)) {
    throw ContractError("sep_fake must exceed shift_real");
  }
  std::vector<double> center = spec.real_center;
  if (center.empty()) center.assign(spec.dim, 0.0);
  if (center.size() != spec.dim) throw ContractError("real_center has the wrong dimension");

  for (std::size_t d = 0; d < spec.domains.size(); ++d) {
    const DomainSpec& dom = spec.domains[d];
    const std::string tag = "domain " + std::to_string(d);
    if (dom.domain_id != static_cast<int>(d)) {
      throw ContractError(tag + ": domain ids must be 0..N-1 in order");
    }
    if (spec.per_domain_counts[d] < 1) throw ContractError(tag + ": count must be >= 1");
    if (dom.real_mean.size() != spec.dim) throw ContractError(tag + ": real_mean dimension");
    if (!(dom.real_scale >= 0.0) || !(dom.fake_scale >= 0.0)) {
      throw ContractError(tag + ": scales must be non-negative");
    }
    if (dom.fake_means.empty()) throw ContractError(tag + ": needs at least one fake mode");
    for (const auto& m : dom.fake_means) {
      if (m.size() != spec.dim) throw ContractError(tag + ": fake mean dimension");
    }
    // Small slack so a spec written with rounded decimals still validates.
    if (distance(dom.real_mean, center) > spec.shift_real * (1.0 + 1e-9) + 1e-12) {
      throw ContractError(tag + ": real_mean is farther than shift_real from the real center");
    }
  }
  for (std::size_t a = 0; a < spec.domains.size(); ++a) {
    for (std::size_t b = a + 1; b < spec.domains.size(); ++b) {
      for (const auto& ma : spec.domains[a].fake_means) {
        for (const auto& mb : spec.domains[b].fake_means) {
          if (distance(ma, mb) < spec.sep_fake) {
            throw ContractError("fake modes of domains " + std::to_string(a) + " and " +
                                std::to_string(b) + " are closer than sep_fake");
          }
        }
      }
    }
  }
}

Dataset generate(const DatasetSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  ds.n_domains = static_cast<int>(spec.domains.size());
  ds.dim = spec.dim;
  ds.seed = seed;
  for (std::size_t d = 0; d < spec.domains.size(); ++d) {
    const DomainSpec& dom = spec.domains[d];
    const std::size_t count = spec.per_domain_counts[d];
    for (std::size_t i = 0; i < count; ++i) {
      Sample s{std::vector<double>(spec.dim), Cls::kReal, dom.domain_id};
      for (std::size_t c = 0; c < spec.dim; ++c) {
        s.features[c] = dom.real_mean[c] + dom.real_scale * normal(rng);
      }
      ds.samples.push_back(std::move(s));
    }
    std::uniform_int_distribution<std::size_t> pick(0, dom.fake_means.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& mean = dom.fake_means[pick(rng)];
      Sample s{std::vector<double>(spec.dim), Cls::kFake, dom.domain_id};
      for (std::size_t c = 0; c < spec.dim; ++c) {
        s.features[c] = mean[c] + dom.fake_scale * normal(rng);
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

DatasetSpec make_geometry(const GeometryConfig& cfg, std::uint64_t seed) {
  if (cfg.n_domains < 1 || cfg.fake_modes < 1) {
    throw ContractError("geometry needs at least one domain and one fake mode");
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DatasetSpec spec;
  spec.dim = cfg.dim;
  spec.real_center.assign(cfg.dim, 0.0);
  spec.shift_real = cfg.shift_real;
  spec.sep_fake = cfg.sep_fake;

  std::vector<std::vector<double>> placed;  // fake modes of earlier domains
  for (int d = 0; d < cfg.n_domains; ++d) {
    DomainSpec dom;
    dom.domain_id = d;
    dom.real_scale = cfg.real_scale;
    dom.fake_scale = cfg.fake_scale;
    const auto dir = random_unit(cfg.dim, rng);
    const double r = cfg.shift_real * unit(rng);
    dom.real_mean.resize(cfg.dim);
    for (std::size_t c = 0; c < cfg.dim; ++c) dom.real_mean[c] = r * dir[c];

    for (int m = 0; m < cfg.fake_modes; ++m) {
      std::vector<double> mode;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) {
          throw ContractError("cannot place fake modes with the requested separation");
        }
        mode = random_unit(cfg.dim, rng);
        for (double& x : mode) x *= cfg.fake_radius;
        const bool ok = std::all_of(placed.begin(), placed.end(), [&](const auto& other) {
          return distance(mode, other) >= cfg.sep_fake;
        });
        if (ok) break;
      }
      dom.fake_means.push_back(mode);
    }
    for (const auto& m : dom.fake_means) placed.push_back(m);
    spec.domains.push_back(std::move(dom));
  }
  spec.per_domain_counts.assign(spec.domains.size(), cfg.per_class_count);
  return spec;
}

std::vector<int> asymmetric_relabel(std::span<const Sample> samples,
                                    std::span<const int> source_domains) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const Sample& s : samples) {
    const int ordinal = ordinal_of(source_domains, s.domain);
    labels.push_back(s.cls == Cls::kReal ? 0 : ordinal + 1);
  }
  return labels;
}

std::vector<int> binary_relabel(std::span<const Sample> samples) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const Sample& s : samples) labels.push_back(s.cls == Cls::kReal ? 0 : 1);
  return labels;
}

std::vector<int> domain_ordinals(std::span<const Sample> samples,
                                 std::span<const int> source_domains) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(ordinal_of(source_domains, s.domain));
  return out;
}

BalancedBatchSampler::BalancedBatchSampler(const Dataset& ds, std::vector<int> source_domains,
                                           std::size_t batch_size, std::uint64_t seed)
    : ds_(&ds), sources_(std::move(source_domains)), per_group_(0), rng_(seed) {
  const std::size_t groups = 2 * sources_.size();
  if (sources_.empty()) throw ContractError("sampler needs at least one source domain");
  if (batch_size == 0 || batch_size % groups != 0) {
    throw ContractError("batch size " + std::to_string(batch_size) +
                        " is not a positive multiple of 2 * N = " + std::to_string(groups));
  }
  per_group_ = batch_size / groups;
  pools_.resize(groups);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    const auto it = std::find(sources_.begin(), sources_.end(), s.domain);
    if (it == sources_.end()) continue;
    pools_[2 * static_cast<std::size_t>(it - sources_.begin()) + to_int(s.cls)].push_back(i);
  }
  for (std::size_t g = 0; g < groups; ++g) {
    if (pools_[g].empty()) {
      throw ContractError("source domain " + std::to_string(sources_[g / 2]) + " has no " +
                          (g % 2 ? "real" : "fake") + " samples");
    }
  }
}

std::vector<std::size_t> BalancedBatchSampler::next_indices() {
  std::vector<std::size_t> out;
  out.reserve(per_group_ * pools_.size());
  for (const auto& pool : pools_) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < per_group_; ++i) out.push_back(pool[pick(rng_)]);
  }
  std::shuffle(out.begin(), out.end(), rng_);
  return out;
}

std::vector<Sample> BalancedBatchSampler::next() {
  std::vector<Sample> batch;
  for (std::size_t i : next_indices()) batch.push_back(ds_->samples[i]);
  return batch;
}

std::vector<Sample> select_domains(std::span<const Sample> samples, std::span<const int> domains) {
  std::vector<Sample> out;
  for (const Sample& s : samples) {
    if (std::find(domains.begin(), domains.end(), s.domain) != domains.end()) out.push_back(s);
  }
  return out;
}

double centroid_spread(std::span<const double> rows, std::size_t dim, std::span<const Cls> cls,
                       std::span<const int> domains, Cls which) {
  std::map<int, std::pair<std::vector<double>, std::size_t>> acc;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] != which) continue;
    auto& [sum, count] = acc[domains[i]];
    if (sum.empty()) sum.assign(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) sum[c] += rows[i * dim + c];
    ++count;
  }
  std::vector<std::vector<double>> centroids;
  for (auto& [domain, entry] : acc) {
    for (double& v : entry.first) v /= static_cast<double>(entry.second);
    centroids.push_back(entry.first);
  }
  if (centroids.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < centroids.size(); ++a) {
    for (std::size_t b = a + 1; b < centroids.size(); ++b) {
      total += distance(centroids[a], centroids[b]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double centroid_spread(std::span<const Sample> samples, Cls which) {
  if (samples.empty()) return 0.0;
  const std::size_t dim = samples.front().features.size();
  std::vector<double> rows;
  std::vector<Cls> cls;
  std::vector<int> domains;
  for (const Sample& s : samples) {
    rows.insert(rows.end(), s.features.begin(), s.features.end());
    cls.push_back(s.cls);
    domains.push_back(s.domain);
  }
  return centroid_spread(rows, dim, cls, domains, which);
}

void write_csv(const Dataset& ds, std::ostream& os) {
  for (std::size_t c = 0; c < ds.dim; ++c) os << 'f' << c << ',';
  os << "cls,domain\n";
  for (const Sample& s : ds.samples) {
    for (double v : s.features) os << io::format_double(v) << ',';
    os << to_int(s.cls) << ',' << s.domain << '\n';
  }
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ostringstream os;
  write_csv(ds, os);
  io::write_text_file(path, os.str());
}

Dataset read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("dataset CSV is empty");
  const auto header = io::split(line, ',');
  if (header.size() < 4 || header[header.size() - 2] != "cls" || header.back() != "domain") {
    throw std::runtime_error("dataset CSV header must be f0..f{d-1},cls,domain");
  }
  Dataset ds;
  ds.dim = header.size() - 2;
  for (std::size_t c = 0; c < ds.dim; ++c) {
    if (header[c] != "f" + std::to_string(c)) {
      throw std::runtime_error("dataset CSV: unexpected column '" + std::string(header[c]) + "'");
    }
  }
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = io::split(line, ',');
    if (fields.size() != header.size()) {
      throw std::runtime_error("dataset CSV line " + std::to_string(line_no) +
                               ": wrong field count");
    }
    Sample s;
    s.features.reserve(ds.dim);
    for (std::size_t c = 0; c < ds.dim; ++c) s.features.push_back(io::parse_double(fields[c]));
    const long long cls = io::parse_int(fields[ds.dim]);
    if (cls != 0 && cls != 1) {
      throw std::runtime_error("dataset CSV line " + std::to_string(line_no) + ": cls not 0/1");
    }
    s.cls = static_cast<Cls>(cls);
    s.domain = static_cast<int>(io::parse_int(fields[ds.dim + 1]));
    if (s.domain < 0) throw std::runtime_error("dataset CSV: negative domain");
    ds.n_domains = std::max(ds.n_domains, s.domain + 1);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open dataset CSV: " + path);
  return read_csv(is);
}

}  // namespace ssdg
