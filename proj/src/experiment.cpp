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

#include "ssdg/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ssdg/io.hpp"

namespace ssdg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ContractError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ContractError(std::string("unknown key '") + key + "' in " + where);
  }
}

json model_to_json(const ModelConfig& m) {
  return {{"input_dim", m.input_dim},     {"hidden", m.hidden},       {"embedding", m.embedding},
          {"disc_hidden", m.disc_hidden}, {"n_domains", m.n_domains}, {"scale", m.scale},
          {"normalize", m.normalize}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig m;
  check_keys(j,
             {"input_dim", "hidden", "embedding", "disc_hidden", "n_domains", "scale", "normalize"},
             "model");
  read_opt(j, "input_dim", m.input_dim);
  read_opt(j, "hidden", m.hidden);
  read_opt(j, "embedding", m.embedding);
  read_opt(j, "disc_hidden", m.disc_hidden);
  read_opt(j, "n_domains", m.n_domains);
  read_opt(j, "scale", m.scale);
  read_opt(j, "normalize", m.normalize);
  return m;
}

void put_le_double(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_le_double(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

std::string to_text(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

}  // namespace

void validate(const ExperimentConfig& c) {
  if (c.sources.empty()) throw ContractError("at least one source domain is required");
  if (std::find(c.sources.begin(), c.sources.end(), c.target) != c.sources.end()) {
    throw ContractError("target domain must not be a source domain");
  }
  std::vector<int> sorted = c.sources;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractError("source domains must be distinct");
  }
  if (c.seeds.empty()) throw ContractError("at least one seed is required");
  TrainConfig t = c.train;
  t.source_domains = c.sources;
  validate(t);
}

GeometryConfig geometry_from_json(const json& g) {
  check_keys(g,
             {"dim", "n_domains", "shift_real", "sep_fake", "fake_radius", "fake_modes",
              "real_scale", "fake_scale", "per_class_count", "geometry_seed"},
             "geometry");
  GeometryConfig gc;
  if (g.contains("geometry_seed") && !g.at("geometry_seed").is_null()) {
    gc.geometry_seed = g.at("geometry_seed").get<std::uint64_t>();
  }
  read_opt(g, "dim", gc.dim);
  read_opt(g, "n_domains", gc.n_domains);
  read_opt(g, "shift_real", gc.shift_real);
  read_opt(g, "sep_fake", gc.sep_fake);
  read_opt(g, "fake_radius", gc.fake_radius);
  read_opt(g, "fake_modes", gc.fake_modes);
  read_opt(g, "real_scale", gc.real_scale);
  read_opt(g, "fake_scale", gc.fake_scale);
  read_opt(g, "per_class_count", gc.per_class_count);
  return gc;
}

DatasetSpec dataset_spec_from_json(const json& j, std::uint64_t seed) {
  if (j.contains("geometry")) {
    check_keys(j, {"geometry"}, "dataset spec");
    const GeometryConfig g = geometry_from_json(j.at("geometry"));
    return make_geometry(g, g.geometry_seed.value_or(seed));
  }
  check_keys(j, {"dim", "real_center", "shift_real", "sep_fake", "domains", "per_domain_counts"},
             "dataset spec");
  DatasetSpec spec;
  spec.dim = j.at("dim").get<std::size_t>();
  read_opt(j, "real_center", spec.real_center);
  spec.shift_real = j.at("shift_real").get<double>();
  spec.sep_fake = j.at("sep_fake").get<double>();
  int id = 0;
  for (const json& d : j.at("domains")) {
    check_keys(d, {"real_mean", "real_scale", "fake_means", "fake_scale"}, "domain");
    DomainSpec dom;
    dom.domain_id = id++;
    dom.real_mean = d.at("real_mean").get<std::vector<double>>();
    read_opt(d, "real_scale", dom.real_scale);
    dom.fake_means = d.at("fake_means").get<std::vector<std::vector<double>>>();
    read_opt(d, "fake_scale", dom.fake_scale);
    spec.domains.push_back(std::move(dom));
  }
  spec.per_domain_counts = j.at("per_domain_counts").get<std::vector<std::size_t>>();
  return spec;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, {"data", "sources", "target", "train", "ablation", "seeds", "threshold", "out"},
             "config");
  ExperimentConfig c;
  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, {"csv", "geometry"}, "data");
    if (d.contains("csv") && !d.at("csv").is_null()) c.data.csv = d.at("csv").get<std::string>();
    if (d.contains("geometry")) c.data.geometry = geometry_from_json(d.at("geometry"));
  }
  read_opt(j, "sources", c.sources);
  read_opt(j, "target", c.target);
  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t,
               {"mode", "lr", "momentum", "weight_decay", "total_iters", "batch_size", "lambda1",
                "lambda2", "alpha", "mining", "model"},
               "train");
    TrainConfig& tc = c.train;
    if (t.contains("mode")) tc.mode = parse_mode(t.at("mode").get<std::string>());
    read_opt(t, "lr", tc.lr);
    read_opt(t, "momentum", tc.momentum);
    read_opt(t, "weight_decay", tc.weight_decay);
    read_opt(t, "total_iters", tc.total_iters);
    read_opt(t, "batch_size", tc.batch_size);
    read_opt(t, "lambda1", tc.weights.lambda1);
    read_opt(t, "lambda2", tc.weights.lambda2);
    read_opt(t, "alpha", tc.weights.alpha);
    if (t.contains("mining")) tc.mining = parse_mining(t.at("mining").get<std::string>());
    if (t.contains("model")) tc.model = model_from_json(t.at("model"));
  }
  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    check_keys(a, {"ssad", "triplet", "norm"}, "ablation");
    read_opt(a, "ssad", c.train.components.ssad);
    read_opt(a, "triplet", c.train.components.triplet);
    read_opt(a, "norm", c.train.components.norm);
  }
  read_opt(j, "seeds", c.seeds);
  if (j.contains("threshold")) {
    c.threshold = parse_threshold_policy(j.at("threshold").get<std::string>());
  }
  read_opt(j, "out", c.out_dir);
  c.train.source_domains = c.sources;
  return c;
}

json to_json(const ExperimentConfig& c) {
  const GeometryConfig& g = c.data.geometry;
  const TrainConfig& t = c.train;
  json j;
  j["data"]["csv"] = c.data.csv ? json(*c.data.csv) : json(nullptr);
  j["data"]["geometry"] = {
      {"dim", g.dim},
      {"n_domains", g.n_domains},
      {"shift_real", g.shift_real},
      {"sep_fake", g.sep_fake},
      {"fake_radius", g.fake_radius},
      {"fake_modes", g.fake_modes},
      {"real_scale", g.real_scale},
      {"fake_scale", g.fake_scale},
      {"per_class_count", g.per_class_count},
      {"geometry_seed", g.geometry_seed ? json(*g.geometry_seed) : json(nullptr)}};
  j["sources"] = c.sources;
  j["target"] = c.target;
  json model = model_to_json(t.model);
  model.erase("input_dim");
  model.erase("n_domains");
  model.erase("normalize");
  j["train"] = {{"mode", to_string(t.mode)},
                {"lr", t.lr},
                {"momentum", t.momentum},
                {"weight_decay", t.weight_decay},
                {"total_iters", t.total_iters},
                {"batch_size", t.batch_size},
                {"lambda1", t.weights.lambda1},
                {"lambda2", t.weights.lambda2},
                {"alpha", t.weights.alpha},
                {"mining", to_string(t.mining)},
                {"model", model}};
  j["ablation"] = {
      {"ssad", t.components.ssad}, {"triplet", t.components.triplet}, {"norm", t.components.norm}};
  j["seeds"] = c.seeds;
  j["threshold"] = to_string(c.threshold);
  j["out"] = c.out_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ContractError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string variant_label(Mode mode, const Components& c) {
  std::string label = to_string(mode);
  if (!c.ssad) label += "-no-ssad";
  if (!c.triplet) label += "-no-triplet";
  if (!c.norm) label += "-no-norm";
  return label;
}

Dataset make_dataset(const DataConfig& data, std::uint64_t seed) {
  if (data.csv) return read_csv(*data.csv);
  return generate(make_geometry(data.geometry, data.geometry.geometry_seed.value_or(seed)), seed);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ScoredSet score_domain(const ModelParams& params, const Dataset& ds, int domain) {
  const std::vector<int> which{domain};
  const auto samples = select_domains(ds.samples, which);
  if (samples.empty()) {
    throw ContractError("domain " + std::to_string(domain) + " has no samples");
  }
  ScoredSet s;
  s.scores = real_scores(params, samples);
  for (const Sample& x : samples) s.labels.push_back(x.cls);
  return s;
}

void dump_embeddings(const ModelParams& params, const Dataset& ds, const std::vector<int>& sources,
                     const std::string& path) {
  const Tensor emb = embed(params, ds.samples);
  std::ostringstream os;
  for (std::size_t c = 0; c < emb.cols(); ++c) os << 'e' << c << ',';
  os << "cls,domain,split\n";
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    for (std::size_t c = 0; c < emb.cols(); ++c) os << io::format_double(emb(i, c)) << ',';
    const Sample& s = ds.samples[i];
    const bool source = std::find(sources.begin(), sources.end(), s.domain) != sources.end();
    os << to_int(s.cls) << ',' << s.domain << ',' << (source ? "source" : "target") << '\n';
  }
  io::write_text_file(path, os.str());
}

std::string save_checkpoint(const ModelParams& params, const std::string& stem) {
  const std::string manifest_path = stem + ".json";
  const std::string bin_path = stem + ".bin";
  json manifest;
  manifest["format"] = "ssdg-checkpoint-v1";
  manifest["model"] = model_to_json(params.config);
  manifest["data"] = fs::path(bin_path).filename().string();
  manifest["dtype"] = "float64-le";
  std::string blob;
  std::size_t offset = 0;
  for (const Parameter* p : params.all()) {
    manifest["tensors"].push_back(
        {{"name", p->name}, {"shape", p->value.shape()}, {"offset", offset}});
    for (double v : p->value.data()) put_le_double(blob, v);
    offset += p->value.size();
  }
  io::write_text_file(bin_path, blob);
  io::write_text_file(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

ModelParams load_checkpoint(const std::string& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(io::read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw ContractError("checkpoint " + manifest_path + ": " + e.what());
  }
  if (manifest.value("format", "") != "ssdg-checkpoint-v1") {
    throw ContractError("checkpoint " + manifest_path + ": unknown format");
  }
  const ModelConfig config = model_from_json(manifest.at("model"));
  // Shapes and names come from a fresh model; values from the blob.
  ModelParams params = init_params(config, 0);
  const fs::path bin =
      fs::path(manifest_path).parent_path() / manifest.at("data").get<std::string>();
  const std::string blob = io::read_text_file(bin.string());
  const json& tensors = manifest.at("tensors");
  const auto all = params.all();
  if (tensors.size() != all.size()) throw ContractError("checkpoint: wrong tensor count");
  for (std::size_t i = 0; i < all.size(); ++i) {
    const json& t = tensors[i];
    if (t.at("name").get<std::string>() != all[i]->name ||
        t.at("shape").get<Shape>() != all[i]->value.shape()) {
      throw ContractError("checkpoint: tensor " + std::to_string(i) + " does not match the model");
    }
    const std::size_t offset = t.at("offset").get<std::size_t>();
    if ((offset + all[i]->value.size()) * 8 > blob.size()) {
      throw ContractError("checkpoint: data file is truncated");
    }
    for (std::size_t k = 0; k < all[i]->value.size(); ++k) {
      all[i]->value[k] = get_le_double(blob, (offset + k) * 8);
    }
  }
  return params;
}

namespace {

RunResult run_one(const ExperimentConfig& config, std::uint64_t seed) {
  RunResult r;
  r.seed = seed;
  r.variant = variant_label(config.train.mode, config.train.components);
  const Dataset ds = make_dataset(config.data, seed);
  for (int d : config.sources) {
    if (d < 0 || d >= ds.n_domains) throw ContractError("source domain not in dataset");
  }
  if (config.target < 0 || config.target >= ds.n_domains) {
    throw ContractError("target domain not in dataset");
  }
  TrainConfig tc = config.train;
  tc.source_domains = config.sources;
  tc.seed = seed;
  TrainResult trained = train(tc, ds);

  r.report = evaluate(score_domain(trained.params, ds, config.target), config.threshold);
  const auto source_samples = select_domains(ds.samples, config.sources);
  const Tensor emb = embed(trained.params, source_samples);
  std::vector<Cls> cls;
  std::vector<int> domains;
  for (const Sample& s : source_samples) {
    cls.push_back(s.cls);
    domains.push_back(s.domain);
  }
  r.real_spread = centroid_spread(emb.data(), emb.cols(), cls, domains, Cls::kReal);
  r.fake_spread = centroid_spread(emb.data(), emb.cols(), cls, domains, Cls::kFake);

  if (!config.out_dir.empty()) {
    const fs::path dir = fs::path(config.out_dir) / r.variant / std::to_string(seed);
    io::write_text_file((dir / "metrics.txt").string(), to_text([&](std::ostream& os) {
                          write_report(r.report, config.threshold, os);
                          os << "real_spread=" << io::format_double(r.real_spread) << '\n'
                             << "fake_spread=" << io::format_double(r.fake_spread) << '\n';
                        }));
    io::write_text_file((dir / "roc.csv").string(),
                        to_text([&](std::ostream& os) { write_roc_csv(r.report.roc, os); }));
    r.history_path = (dir / "history.csv").string();
    io::write_text_file(r.history_path,
                        to_text([&](std::ostream& os) { write_history_csv(trained.history, os); }));
    dump_embeddings(trained.params, ds, config.sources, (dir / "embeddings.csv").string());
    r.checkpoint_path = save_checkpoint(trained.params, (dir / "checkpoint").string());
  }
  r.params = std::move(trained.params);
  r.ok = true;
  return r;
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::vector<RunResult> results(config.seeds.size());
  const auto n = static_cast<std::ptrdiff_t>(config.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::uint64_t seed = config.seeds[static_cast<std::size_t>(i)];
    try {
      results[static_cast<std::size_t>(i)] = run_one(config, seed);
    } catch (const std::exception& e) {
      RunResult& r = results[static_cast<std::size_t>(i)];
      r.seed = seed;
      r.variant = variant_label(config.train.mode, config.train.components);
      r.ok = false;
      r.error = e.what();
    }
  }
  if (!config.out_dir.empty()) {
    const std::vector<VariantSummary> rows{summarize(results)};
    const fs::path path = fs::path(config.out_dir) /
                          variant_label(config.train.mode, config.train.components) / "summary.csv";
    io::write_text_file(path.string(),
                        to_text([&](std::ostream& os) { write_summary_csv(rows, os); }));
  }
  return results;
}

VariantSummary summarize(const std::vector<RunResult>& runs) {
  VariantSummary s;
  std::vector<double> aucs, hters;
  for (const RunResult& r : runs) {
    if (s.variant.empty()) s.variant = r.variant;
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    ++s.runs;
    aucs.push_back(r.report.auc);
    hters.push_back(r.report.hter);
  }
  s.median_auc = median(aucs);
  s.median_hter = median(hters);
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  s.mean_auc = mean(aucs);
  s.mean_hter = mean(hters);
  return s;
}

void write_summary_csv(const std::vector<VariantSummary>& rows, std::ostream& os) {
  os << "variant,runs,failed,median_auc,mean_auc,median_hter,mean_hter\n";
  for (const VariantSummary& s : rows) {
    os << s.variant << ',' << s.runs << ',' << s.failed << ',' << io::format_double(s.median_auc)
       << ',' << io::format_double(s.mean_auc) << ',' << io::format_double(s.median_hter) << ','
       << io::format_double(s.mean_hter) << '\n';
  }
}

}  // namespace ssdg
