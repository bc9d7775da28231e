// tools/ldadnn_cli.cc


// Copyright 2026  The ldadnn Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


// Stage-wise driver for the domain discovery pipeline:
//
//   synth -> train-gmm -> quantize -> train-lda -> assign -> entropy / filter
//         -> stats -> augment-train -> eval
//
// Every stage reads and writes files, never touches its own inputs, writes
// atomically and stamps {stage, seed} into each artifact.  Option values come
// from the command line first, then from a JSON manifest (--manifest), then
// from the built-in defaults.  `pipeline` runs the manifest's step list.
//
// Exit status: 0 on success, 2 for flag or manifest problems, 1 for data
// errors.  Failures print one JSON object on stderr:
//   {"command":"train-lda","error":"parse","message":"..."}

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "ldadnn/common.h"
#include "ldadnn/corpus.h"
#include "ldadnn/domains.h"
#include "ldadnn/gmm.h"
#include "ldadnn/io.h"
#include "ldadnn/lda.h"
#include "ldadnn/network.h"
#include "ldadnn/rng.h"
#include "ldadnn/synthetic.h"

namespace {

using namespace ldadnn;
namespace fs = std::filesystem;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Bad flags, bad manifests and input/output clashes.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Log(const std::string &command, const std::string &message) {
  std::cerr << "[ldadnn " << command << "] " << message << "\n";
}

void PrintError(const std::string &command, const std::string &code,
                const std::string &message) {
  std::cerr << Json{{"command", command}, {"error", code}, {"message", message}}.dump()
            << "\n";
}

std::string FormatNumber(double v) {
  std::string s = Json(v).dump();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string CsvMeta(const ArtifactMeta &meta) {
  return "# " + MetaToJson(meta).dump() + "\n";
}

void WriteJsonArtifact(const std::string &path, Json json, const ArtifactMeta &meta) {
  json["meta"] = MetaToJson(meta);
  WriteFileAtomic(path, json.dump() + "\n");
}

std::vector<int> ParseIntList(const std::string &text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception &) {
      throw UsageError("expected a comma-separated list of positive integers, got '" +
                       text + "'");
    }
  }
  return out;
}

// Refuses to let a stage overwrite one of its inputs or write two outputs to
// the same file.
void CheckPaths(const std::vector<std::string> &inputs,
                const std::vector<std::string> &outputs) {
  auto canon = [](const std::string &p) { return fs::weakly_canonical(fs::path(p)); };
  std::vector<fs::path> seen;
  for (const auto &out : outputs) {
    if (out.empty()) continue;
    const auto c = canon(out);
    for (const auto &in : inputs)
      if (!in.empty() && canon(in) == c)
        throw UsageError("output '" + out + "' is also an input of this stage");
    for (const auto &s : seen)
      if (s == c) throw UsageError("output '" + out + "' is named twice");
    seen.push_back(c);
  }
}

std::vector<FeatureDocument> ReadFeatures(const std::string &path) {
  return LoadFeatures(path, FeatureFormatFromPath(path));
}

struct DomainTable {
  int num_domains = 0;
  std::unordered_map<std::string, int> map_domain;
};

DomainTable ReadDomainTable(const std::string &path) {
  DomainTable table;
  for (const auto &a : LoadAssignments(path)) {
    if (table.num_domains == 0) table.num_domains = a.num_domains;
    if (a.num_domains != table.num_domains)
      throw Error(ErrorCode::kDimensionMismatch, "assignments in " + path + " differ in K");
    if (!table.map_domain.emplace(a.doc_id, a.map_domain).second)
      throw Error(ErrorCode::kDuplicateId, "duplicate id '" + a.doc_id + "' in " + path);
  }
  if (table.num_domains == 0) throw Error(ErrorCode::kPrecondition, path + " has no assignments");
  return table;
}

// Frame-level dataset; every frame inherits its document's MAP domain.
FrameDataset BuildDataset(const std::vector<FeatureDocument> &docs, const DomainTable *domains) {
  FrameDataset data;
  int64_t frames = 0;
  for (const auto &d : docs) frames += d.NumFrames();
  if (docs.empty() || frames == 0) throw Error(ErrorCode::kPrecondition, "no frames to use");
  const int D = docs.front().Dim();
  data.features.resize(D, frames);
  if (domains) data.num_domains = domains->num_domains;
  Eigen::Index col = 0;
  for (const auto &d : docs) {
    if (static_cast<int>(d.labels.size()) != d.NumFrames())
      throw Error(ErrorCode::kPrecondition,
                  "document '" + d.id + "' has no per-frame labels");
    int domain = -1;
    if (domains) {
      auto it = domains->map_domain.find(d.id);
      if (it == domains->map_domain.end())
        throw Error(ErrorCode::kIdMismatch, "document '" + d.id + "' has no domain assignment");
      domain = it->second;
    }
    for (int t = 0; t < d.NumFrames(); ++t, ++col) {
      data.features.col(col) = d.frames.row(t).transpose();
      data.labels.push_back(d.labels[t]);
      if (domains) data.domains.push_back(domain);
    }
  }
  return data;
}

// Id -> group from any jsonl artifact carrying "id" and optional "group".
std::map<std::string, std::string> ReadGroups(const std::string &path) {
  std::map<std::string, std::string> groups;
  ForEachJsonLine(path, [&](int line, const Json &obj) {
    if (!obj.contains("id") || !obj["id"].is_string())
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) + ": missing id");
    const auto it = obj.find("group");
    groups[obj["id"].get<std::string>()] =
        it != obj.end() && it->is_string() ? it->get<std::string>() : "unknown";
  });
  return groups;
}

// ---------------------------------------------------------------------------
// Manifest handling.

bool HasFlag(const std::vector<std::string> &args, const std::string &name) {
  const std::string flag = "--" + name;
  for (const auto &a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

std::optional<std::string> FlagValue(const std::vector<std::string> &args,
                                     const std::string &name) {
  const std::string flag = "--" + name;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

// Appends `--key value` for a manifest entry unless the flag is already set.
void AppendSetting(std::vector<std::string> *args, const std::string &key, const Json &value) {
  if (HasFlag(*args, key)) return;
  if (value.is_boolean()) {
    if (value.get<bool>()) args->push_back("--" + key);
    return;
  }
  std::string text;
  if (value.is_string()) {
    text = value.get<std::string>();
  } else if (value.is_array()) {
    for (const auto &v : value) {
      if (!text.empty()) text += ",";
      text += v.is_string() ? v.get<std::string>() : v.dump();
    }
  } else if (value.is_number()) {
    text = value.dump();
  } else {
    throw UsageError("manifest value for '" + key + "' must be a string, number, "
                     "boolean or list");
  }
  args->push_back("--" + key);
  args->push_back(text);
}

Json ReadManifest(const std::string &path) {
  try {
    Json m = ReadJsonFile(path);
    if (!m.is_object()) throw UsageError("manifest must be a JSON object");
    return m;
  } catch (const Error &e) {
    throw UsageError("cannot read manifest '" + path + "': " + e.what());
  }
}

// Fills missing flags of `command` from the manifest: the stage's own block
// first, then the global seed and thread count.
std::vector<std::string> WithManifest(const std::string &command, std::vector<std::string> args) {
  const auto path = FlagValue(args, "manifest");
  if (!path) return args;
  const Json m = ReadManifest(*path);
  if (m.contains("stages")) {
    const Json &stages = m["stages"];
    if (!stages.is_object()) throw UsageError("manifest 'stages' must be an object");
    if (stages.contains(command)) {
      if (!stages[command].is_object())
        throw UsageError("manifest stage '" + command + "' must be an object");
      for (const auto &[key, value] : stages[command].items()) AppendSetting(&args, key, value);
    }
  }
  for (const char *key : {"seed", "threads"})
    if (m.contains(key)) AppendSetting(&args, key, m[key]);
  return args;
}

// ---------------------------------------------------------------------------
// Stages.

struct Common {
  uint64_t seed = 0;
  int threads = 1;
  std::string manifest;
};

void AddCommon(CLI::App *sub, Common *c) {
  sub->add_option("--seed", c->seed, "Seed, recorded in every artifact")->capture_default_str();
  sub->add_option("--threads", c->threads, "Worker threads (1 is bit-reproducible)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--manifest", c->manifest,
                  "JSON manifest supplying defaults for flags not given");
}

struct SynthOpts {
  std::string out, truth_out;
  int docs = DomainCorpusSpec{}.num_docs;
  int domains = DomainShiftSpec{}.num_domains;
  int classes = DomainShiftSpec{}.num_classes;
  int dim = DomainShiftSpec{}.dim;
  int min_frames = DomainCorpusSpec{}.min_frames;
  int max_frames = DomainCorpusSpec{}.max_frames;
  int groups = DomainCorpusSpec{}.num_groups;
  double class_spread = DomainShiftSpec{}.class_spread;
  double domain_shift = DomainShiftSpec{}.domain_shift;
  double noise = DomainShiftSpec{}.noise;
  double group_concentration = DomainCorpusSpec{}.group_concentration;
};

int RunSynth(const SynthOpts &o, const Common &c) {
  CheckPaths({}, {o.out, o.truth_out});
  DomainShiftSpec shift;
  shift.num_domains = o.domains;
  shift.num_classes = o.classes;
  shift.dim = o.dim;
  shift.class_spread = o.class_spread;
  shift.domain_shift = o.domain_shift;
  shift.noise = o.noise;
  DomainCorpusSpec spec;
  spec.shift = shift;
  spec.num_docs = o.docs;
  spec.min_frames = o.min_frames;
  spec.max_frames = o.max_frames;
  spec.num_groups = o.groups;
  spec.group_concentration = o.group_concentration;
  Rng rng(c.seed);
  const auto task = MakeDomainShiftTask(shift, rng.NextU64());
  std::vector<int> truth;
  const auto docs = SampleDomainCorpus(task, spec, rng.NextU64(), &truth);
  const ArtifactMeta meta{"synth", c.seed};
  SaveFeatures(o.out, docs, FeatureFormatFromPath(o.out), &meta);
  if (!o.truth_out.empty()) {
    std::string text = Json{{"meta", MetaToJson(meta)}}.dump() + "\n";
    for (size_t m = 0; m < docs.size(); ++m)
      text += Json{{"id", docs[m].id}, {"group", *docs[m].group}, {"domain", truth[m]}}.dump() +
              "\n";
    WriteFileAtomic(o.truth_out, text);
  }
  Log("synth", "wrote " + std::to_string(docs.size()) + " documents to " + o.out);
  return 0;
}

struct TrainGmmOpts {
  std::string features, out, history_out;
  int components = 0;
  GmmConfig config;
};

int RunTrainGmm(TrainGmmOpts o, const Common &c) {
  CheckPaths({o.features}, {o.out, o.history_out});
  o.config.threads = c.threads;
  const auto docs = ReadFeatures(o.features);
  const auto frames = PoolFrames(docs);
  const auto result = TrainGmmWithHistory(frames, o.components, o.config);
  const ArtifactMeta meta{"train-gmm", c.seed};
  WriteJsonArtifact(o.out, result.model.ToJson(), meta);
  if (!o.history_out.empty()) {
    std::string csv = CsvMeta(meta) + "step,num_components,segment,avg_log_likelihood\n";
    for (size_t i = 0; i < result.history.size(); ++i) {
      const auto &h = result.history[i];
      csv += std::to_string(i) + "," + std::to_string(h.num_components) + "," +
             std::to_string(h.segment) + "," + FormatNumber(h.avg_log_likelihood) + "\n";
    }
    WriteFileAtomic(o.history_out, csv);
  }
  Log("train-gmm", std::to_string(result.model.NumComponents()) + " components on " +
                       std::to_string(frames.rows()) + " frames, final avg log-likelihood " +
                       FormatNumber(result.history.empty()
                                        ? 0.0
                                        : result.history.back().avg_log_likelihood));
  return 0;
}

struct QuantizeOpts {
  std::string gmm, features, symbols_out, bags_out;
};

int RunQuantize(const QuantizeOpts &o, const Common &c) {
  if (o.symbols_out.empty() && o.bags_out.empty())
    throw UsageError("quantize needs --symbols-out and/or --bags-out");
  CheckPaths({o.gmm, o.features}, {o.symbols_out, o.bags_out});
  const auto model = GmmModel::FromJson(ReadJsonFile(o.gmm));
  const auto docs = ReadFeatures(o.features);
  const auto symbols = QuantizeAll(model, docs, c.threads);
  const ArtifactMeta meta{"quantize", c.seed};
  if (!o.symbols_out.empty()) SaveSymbols(o.symbols_out, symbols, &meta);
  if (!o.bags_out.empty()) {
    std::vector<BagOfSounds> bags;
    bags.reserve(symbols.size());
    for (const auto &s : symbols) bags.push_back(ToBag(s, model.NumComponents()));
    SaveBags(o.bags_out, bags, &meta);
  }
  Log("quantize", std::to_string(docs.size()) + " documents over " +
                      std::to_string(model.NumComponents()) + " symbols");
  return 0;
}

struct TrainLdaOpts {
  std::string bags, out, history_out;
  int k = 0;
  std::optional<double> alpha;
  LdaConfig config;
};

int RunTrainLda(TrainLdaOpts o, const Common &c) {
  CheckPaths({o.bags}, {o.out, o.history_out});
  o.config.seed = c.seed;
  o.config.threads = c.threads;
  o.config.alpha = o.alpha;
  const auto bags = LoadBags(o.bags);
  const auto fit = FitLdaWithHistory(bags, o.k, o.config);
  const ArtifactMeta meta{"train-lda", c.seed};
  WriteJsonArtifact(o.out, fit.model.ToJson(), meta);
  if (!o.history_out.empty()) {
    std::string csv = CsvMeta(meta) + "iteration,elbo,objective\n";
    for (size_t i = 0; i < fit.elbo_history.size(); ++i)
      csv += std::to_string(i + 1) + "," + FormatNumber(fit.elbo_history[i]) + "," +
             FormatNumber(fit.objective_history[i]) + "\n";
    WriteFileAtomic(o.history_out, csv);
  }
  Log("train-lda", "K=" + std::to_string(o.k) + " on " + std::to_string(bags.size()) +
                       " documents, " + std::to_string(fit.iterations) + " EM iterations" +
                       (fit.converged ? " (converged)" : " (iteration cap)"));
  return 0;
}

struct AssignOpts {
  std::string model, bags, out;
  bool theta_excludes_prior = false;
};

int RunAssign(const AssignOpts &o, const Common &c) {
  CheckPaths({o.model, o.bags}, {o.out});
  const auto model = LdaModel::FromJson(ReadJsonFile(o.model));
  LdaConfig cfg;
  cfg.threads = c.threads;
  cfg.theta_excludes_prior = o.theta_excludes_prior;
  const auto assignments = Assign(model, LoadBags(o.bags), cfg);
  const ArtifactMeta meta{"assign", c.seed};
  SaveAssignments(o.out, assignments, &meta);
  Log("assign", std::to_string(assignments.size()) + " documents over K=" +
                    std::to_string(model.NumTopics()));
  return 0;
}

struct EntropyOpts {
  std::string model, bags, assign, unit = "bits", out;
  bool theta_excludes_prior = false;
};

int RunEntropy(const EntropyOpts &o, const Common &c) {
  const bool from_model = !o.model.empty() || !o.bags.empty();
  if (from_model == !o.assign.empty())
    throw UsageError("entropy needs either --model with --bags, or --assign");
  if (from_model && (o.model.empty() || o.bags.empty()))
    throw UsageError("--model and --bags go together");
  CheckPaths({o.model, o.bags, o.assign}, {o.out});
  std::vector<DomainAssignment> assignments;
  if (from_model) {
    const auto model = LdaModel::FromJson(ReadJsonFile(o.model));
    LdaConfig cfg;
    cfg.threads = c.threads;
    cfg.theta_excludes_prior = o.theta_excludes_prior;
    assignments = Assign(model, LoadBags(o.bags), cfg);
  } else {
    assignments = LoadAssignments(o.assign);
  }
  const EntropyUnit unit = o.unit == "nats" ? EntropyUnit::kNats : EntropyUnit::kBits;
  const double h = AverageDomainEntropy(assignments, unit);
  if (!o.out.empty())
    WriteJsonArtifact(o.out,
                      Json{{"entropy", h},
                           {"unit", o.unit},
                           {"K", assignments.empty() ? 0 : assignments.front().num_domains},
                           {"documents", assignments.size()}},
                      ArtifactMeta{"entropy", c.seed});
  std::cout << FormatNumber(h) << "\n";
  return 0;
}

struct FilterOpts {
  std::string assign_a, assign_b, out;
  std::optional<double> target_frac, target_weight;
};

int RunFilter(const FilterOpts &o, const Common &c) {
  if (o.target_frac.has_value() == o.target_weight.has_value())
    throw UsageError("filter needs exactly one of --target-frac and --target-weight");
  CheckPaths({o.assign_a, o.assign_b}, {o.out});
  const auto a = LoadAssignments(o.assign_a);
  const auto b = LoadAssignments(o.assign_b);
  double target = 0.0;
  if (o.target_frac) {
    if (!(*o.target_frac > 0.0 && *o.target_frac <= 1.0))
      throw UsageError("--target-frac must lie in (0, 1]");
    double total = 0.0;
    for (const auto &x : a) total += x.weight;
    target = *o.target_frac * total;
  } else {
    target = *o.target_weight;
  }
  const auto result = CrossAgreementFilter(a, b, target);
  const ArtifactMeta meta{"filter", c.seed};
  SaveFilterResult(o.out, result, a, &meta);
  Log("filter", std::to_string(result.histogram.size()) + " tuples, kept " +
                    std::to_string(result.kept_tuples.size()) + " tuples and " +
                    std::to_string(result.kept_ids.size()) + "/" + std::to_string(a.size()) +
                    " documents, weight " + FormatNumber(result.kept_weight) + " of " +
                    FormatNumber(result.total_weight));
  return 0;
}

struct AugmentTrainOpts {
  std::string features, assign, cv_features, cv_assign, baseline, out, metrics_out;
  std::string hidden = "64,64", activation = "sigmoid";
  int classes = 0;
  TrainConfig train;
};

int RunAugmentTrain(const AugmentTrainOpts &o, const Common &c) {
  if (!o.baseline.empty() && o.assign.empty())
    throw UsageError("--baseline needs --assign (the domain input to add)");
  if (!o.cv_assign.empty() && o.cv_features.empty())
    throw UsageError("--cv-assign needs --cv-features");
  const std::vector<int> hidden = ParseIntList(o.hidden);
  Activation activation;
  try {
    activation = ActivationFromName(o.activation);
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  CheckPaths({o.features, o.assign, o.cv_features, o.cv_assign, o.baseline},
             {o.out, o.metrics_out});

  std::optional<DomainTable> domains, cv_domains;
  if (!o.assign.empty()) domains = ReadDomainTable(o.assign);
  if (!o.cv_assign.empty()) cv_domains = ReadDomainTable(o.cv_assign);
  if (cv_domains && domains && cv_domains->num_domains != domains->num_domains)
    throw Error(ErrorCode::kDimensionMismatch, "--assign and --cv-assign differ in K");
  const FrameDataset train = BuildDataset(ReadFeatures(o.features), domains ? &*domains : nullptr);
  FrameDataset heldout;
  if (!o.cv_features.empty()) {
    const DomainTable *table = cv_domains ? &*cv_domains : (domains ? &*domains : nullptr);
    heldout = BuildDataset(ReadFeatures(o.cv_features), table);
  }

  Rng rng(c.seed);
  const uint64_t init_seed = rng.NextU64();
  TrainConfig tc = o.train;
  tc.seed = rng.NextU64();

  std::unique_ptr<LdatNetwork> net;
  if (!o.baseline.empty()) {
    const auto base = LdatNetwork::FromJson(ReadJsonFile(o.baseline));
    net = std::make_unique<LdatNetwork>(
        InitAugmentedFromBaseline(base, domains->num_domains, init_seed));
  } else {
    int classes = o.classes;
    if (classes == 0) {
      for (int y : train.labels) classes = std::max(classes, y + 1);
      for (int y : heldout.labels) classes = std::max(classes, y + 1);
    }
    NetworkConfig cfg;
    cfg.input_dim = static_cast<int>(train.features.rows());
    cfg.domain_dim = domains ? domains->num_domains : 0;
    cfg.hidden_dims = hidden;
    cfg.output_dim = classes;
    cfg.activation = activation;
    cfg.seed = init_seed;
    net = std::make_unique<LdatNetwork>(cfg);
  }
  const auto result = Train(*net, train, heldout, tc);
  const ArtifactMeta meta{"augment-train", c.seed};
  WriteJsonArtifact(o.out, result.net.ToJson(), meta);
  if (!o.metrics_out.empty()) WriteFileAtomic(o.metrics_out, MetricsCsv(result.metrics, &meta));
  const auto &last = result.metrics.back();
  Log("augment-train",
      std::string(domains ? "K=" + std::to_string(domains->num_domains) : "baseline") +
          ", " + std::to_string(train.Size()) + " frames, final train loss " +
          FormatNumber(last.train_loss) +
          (heldout.Size() > 0 ? ", held-out accuracy " + FormatNumber(last.cv_accuracy) : ""));
  return 0;
}

struct EvalOpts {
  std::string net, features, assign, out;
};

int RunEval(const EvalOpts &o, const Common &c) {
  CheckPaths({o.net, o.features, o.assign}, {o.out});
  const auto net = LdatNetwork::FromJson(ReadJsonFile(o.net));
  if ((net.DomainDim() > 0) != !o.assign.empty())
    throw UsageError(net.DomainDim() > 0 ? "this network needs --assign"
                                         : "--assign given for a network without domain input");
  std::optional<DomainTable> domains;
  if (!o.assign.empty()) domains = ReadDomainTable(o.assign);
  const auto data = BuildDataset(ReadFeatures(o.features), domains ? &*domains : nullptr);
  const double accuracy = FrameAccuracy(net, data);
  const double loss = MeanCrossEntropy(net, data);
  if (!o.out.empty())
    WriteJsonArtifact(o.out,
                      Json{{"frame_accuracy", accuracy},
                           {"cross_entropy", loss},
                           {"frames", data.Size()}},
                      ArtifactMeta{"eval", c.seed});
  std::cout << FormatNumber(accuracy) << "\n";
  return 0;
}

struct StatsOpts {
  std::string assign, groups_from, out, domains_out;
  int top_n = 16;
};

int RunStats(const StatsOpts &o, const Common &c) {
  CheckPaths({o.assign, o.groups_from}, {o.out, o.domains_out});
  const auto assignments = LoadAssignments(o.assign);
  const auto groups = ReadGroups(o.groups_from);
  const ArtifactMeta meta{"stats", c.seed};
  const auto rows = DistributionStats(assignments, groups, o.top_n);
  WriteFileAtomic(o.out, DistributionCsv(rows, &meta));
  if (!o.domains_out.empty()) {
    const auto weights = DomainWeights(assignments);
    double total = 0.0;
    for (double w : weights) total += w;
    std::string csv = CsvMeta(meta) + "domain,weight,normalized\n";
    for (size_t k = 0; k < weights.size(); ++k)
      csv += std::to_string(k) + "," + FormatNumber(weights[k]) + "," +
             FormatNumber(total > 0.0 ? weights[k] / total : 0.0) + "\n";
    WriteFileAtomic(o.domains_out, csv);
  }
  Log("stats", std::to_string(rows.size()) + " rows for " + std::to_string(assignments.size()) +
                   " documents");
  return 0;
}

int Run(std::vector<std::string> args, bool allow_pipeline);

int RunPipeline(const std::string &manifest_path) {
  const Json m = ReadManifest(manifest_path);
  if (!m.contains("steps") || !m["steps"].is_array())
    throw UsageError("manifest needs a 'steps' list");
  const fs::path manifest = fs::absolute(manifest_path);
  // Relative paths in the manifest are relative to its directory.
  const fs::path previous = fs::current_path();
  fs::current_path(manifest.parent_path());
  int status = 0;
  int index = 0;
  for (const auto &step : m["steps"]) {
    ++index;
    if (!step.is_object() || !step.contains("command") || !step["command"].is_string()) {
      fs::current_path(previous);
      throw UsageError("step " + std::to_string(index) + " needs a 'command'");
    }
    const std::string command = step["command"].get<std::string>();
    std::vector<std::string> step_args = {command};
    if (step.contains("args")) {
      if (!step["args"].is_object()) {
        fs::current_path(previous);
        throw UsageError("step " + std::to_string(index) + ": 'args' must be an object");
      }
      for (const auto &[key, value] : step["args"].items()) AppendSetting(&step_args, key, value);
    }
    step_args.push_back("--manifest");
    step_args.push_back(manifest.string());
    Log("pipeline", "step " + std::to_string(index) + ": " + command);
    status = Run(step_args, false);
    if (status != 0) break;
  }
  fs::current_path(previous);
  return status;
}

int Run(std::vector<std::string> args, bool allow_pipeline) {
  std::string command = args.empty() ? "" : args.front();
  CLI::App app{"Latent domain discovery and domain-aware network training", "ldadnn"};
  app.require_subcommand(1);

  Common common;
  std::string pipeline_manifest;

  SynthOpts synth;
  auto *s_synth = app.add_subcommand("synth", "Write a synthetic labelled feature corpus");
  s_synth->add_option("--out", synth.out, "Feature file (.jsonl or .csv)")->required();
  s_synth->add_option("--truth-out", synth.truth_out, "Generating domain per document (jsonl)");
  s_synth->add_option("--docs", synth.docs, "Documents")->capture_default_str();
  s_synth->add_option("--domains", synth.domains, "Latent domains")->capture_default_str();
  s_synth->add_option("--classes", synth.classes, "Frame classes")->capture_default_str();
  s_synth->add_option("--dim", synth.dim, "Feature dimension")->capture_default_str();
  s_synth->add_option("--min-frames", synth.min_frames, "Shortest document, in frames")->capture_default_str();
  s_synth->add_option("--max-frames", synth.max_frames, "Longest document, in frames")->capture_default_str();
  s_synth->add_option("--groups", synth.groups, "Genre-like groups")->capture_default_str();
  s_synth->add_option("--class-spread", synth.class_spread, "Stddev of class means")->capture_default_str();
  s_synth->add_option("--domain-shift", synth.domain_shift, "Stddev of per-domain offsets")->capture_default_str();
  s_synth->add_option("--noise", synth.noise, "Per-frame noise stddev")->capture_default_str();
  s_synth->add_option("--group-concentration", synth.group_concentration, "Dirichlet parameter of group domain preferences")->capture_default_str();
  AddCommon(s_synth, &common);

  TrainGmmOpts gmm;
  auto *s_gmm = app.add_subcommand("train-gmm", "Train a diagonal GMM by mix-up and EM");
  s_gmm->add_option("--features", gmm.features, "Feature file")->required();
  s_gmm->add_option("--components", gmm.components, "Target component count V")
      ->required()
      ->check(CLI::PositiveNumber);
  s_gmm->add_option("--out", gmm.out, "Model JSON")->required();
  s_gmm->add_option("--history-out", gmm.history_out, "Per-pass log-likelihood CSV");
  s_gmm->add_option("--iters-per-split", gmm.config.iters_per_split, "EM passes after each split")->capture_default_str();
  s_gmm->add_option("--max-iters", gmm.config.final_max_iters, "Cap on the final EM run")->capture_default_str();
  s_gmm->add_option("--tol", gmm.config.final_rel_tol, "Relative log-likelihood change that stops the final EM run")->capture_default_str();
  s_gmm->add_option("--variance-floor", gmm.config.variance_floor_scale,
                    "Floor as a fraction of the global variance")
      ->capture_default_str();
  AddCommon(s_gmm, &common);

  QuantizeOpts quant;
  auto *s_quant = app.add_subcommand("quantize", "Map frames to their most likely component");
  s_quant->add_option("--gmm", quant.gmm, "GMM JSON")->required();
  s_quant->add_option("--features", quant.features, "Feature file")->required();
  s_quant->add_option("--symbols-out", quant.symbols_out, "Symbol sequences (jsonl)");
  s_quant->add_option("--bags-out", quant.bags_out, "Bag-of-sounds counts (jsonl)");
  AddCommon(s_quant, &common);

  TrainLdaOpts lda;
  auto *s_lda = app.add_subcommand("train-lda", "Fit LDA by variational EM");
  s_lda->add_option("--bags", lda.bags, "Bag-of-sounds file")->required();
  s_lda->add_option("--k", lda.k, "Number of domains K")->required()->check(CLI::PositiveNumber);
  s_lda->add_option("--out", lda.out, "Model JSON")->required();
  s_lda->add_option("--history-out", lda.history_out, "Per-iteration bound CSV");
  s_lda->add_option("--alpha", lda.alpha, "Symmetric Dirichlet parameter (default 1/K)");
  s_lda->add_option("--smoothing", lda.config.smoothing, "Pseudo-count added to every topic/symbol cell")->capture_default_str();
  s_lda->add_option("--em-tol", lda.config.em_tol, "Relative objective change that stops EM")->capture_default_str();
  s_lda->add_option("--max-em-iters", lda.config.max_em_iters, "Cap on EM iterations")->capture_default_str();
  s_lda->add_option("--gamma-tol", lda.config.gamma_tol, "Per-document convergence threshold on gamma")->capture_default_str();
  s_lda->add_option("--max-e-iters", lda.config.max_e_iters, "Cap on per-document updates")->capture_default_str();
  AddCommon(s_lda, &common);

  AssignOpts assign;
  auto *s_assign = app.add_subcommand("assign", "Infer theta and MAP domain per document");
  s_assign->add_option("--model", assign.model, "LDA model JSON")->required();
  s_assign->add_option("--bags", assign.bags, "Bag-of-sounds file")->required();
  s_assign->add_option("--out", assign.out, "Assignments (jsonl)")->required();
  s_assign->add_flag("--theta-excludes-prior", assign.theta_excludes_prior,
                     "Normalize gamma - alpha instead of gamma");
  AddCommon(s_assign, &common);

  EntropyOpts ent;
  auto *s_ent = app.add_subcommand("entropy", "Print the average domain entropy");
  s_ent->add_option("--model", ent.model, "LDA model JSON");
  s_ent->add_option("--bags", ent.bags, "Bag-of-sounds file");
  s_ent->add_option("--assign", ent.assign, "Existing assignments instead of model + bags");
  s_ent->add_option("--unit", ent.unit, "Entropy unit")->check(CLI::IsMember({"bits", "nats"}))->capture_default_str();
  s_ent->add_option("--out", ent.out, "Also write the value as JSON");
  s_ent->add_flag("--theta-excludes-prior", ent.theta_excludes_prior);
  AddCommon(s_ent, &common);

  FilterOpts filt;
  auto *s_filt = app.add_subcommand("filter", "Cross-agreement filtering of two assignments");
  s_filt->add_option("--assign-a", filt.assign_a, "Assignments from model A")->required();
  s_filt->add_option("--assign-b", filt.assign_b, "Assignments from model B")->required();
  s_filt->add_option("--target-frac", filt.target_frac, "Target as a fraction of total weight");
  s_filt->add_option("--target-weight", filt.target_weight, "Absolute target weight");
  s_filt->add_option("--out", filt.out, "Filter result (jsonl)")->required();
  AddCommon(s_filt, &common);

  AugmentTrainOpts at;
  auto *s_at = app.add_subcommand(
      "augment-train", "Train a frame classifier, domain-aware when --assign is given");
  s_at->add_option("--features", at.features, "Labelled training features (jsonl)")->required();
  s_at->add_option("--assign", at.assign, "Domain assignments; omit for a baseline network");
  s_at->add_option("--cv-features", at.cv_features, "Held-out labelled features");
  s_at->add_option("--cv-assign", at.cv_assign, "Held-out assignments (default: --assign)");
  s_at->add_option("--baseline", at.baseline, "Start from this baseline network, W_d = 0");
  s_at->add_option("--out", at.out, "Network JSON")->required();
  s_at->add_option("--metrics-out", at.metrics_out, "Per-epoch metrics CSV");
  s_at->add_option("--hidden", at.hidden, "Hidden layer sizes, comma separated")
      ->capture_default_str();
  s_at->add_option("--activation", at.activation, "Hidden activation")
      ->check(CLI::IsMember({"sigmoid", "relu"}))
      ->capture_default_str();
  s_at->add_option("--classes", at.classes, "Output classes (default: from labels)");
  s_at->add_option("--lr", at.train.learning_rate, "SGD learning rate")->capture_default_str();
  s_at->add_option("--batch", at.train.batch_size, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
  s_at->add_option("--epochs", at.train.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  s_at->add_flag("--halve-on-increase", at.train.halve_on_increase,
                 "Halve the rate when held-out loss rises");
  AddCommon(s_at, &common);

  EvalOpts ev;
  auto *s_ev = app.add_subcommand("eval", "Print frame accuracy of a network");
  s_ev->add_option("--net", ev.net, "Network JSON")->required();
  s_ev->add_option("--features", ev.features, "Labelled features")->required();
  s_ev->add_option("--assign", ev.assign, "Assignments for a domain-aware network");
  s_ev->add_option("--out", ev.out, "Also write metrics as JSON");
  AddCommon(s_ev, &common);

  StatsOpts st;
  auto *s_st = app.add_subcommand("stats", "Per-group domain distributions as CSV");
  s_st->add_option("--assign", st.assign, "Assignments (jsonl)")->required();
  s_st->add_option("--groups-from", st.groups_from, "jsonl with id and group (bags, features)")
      ->required();
  s_st->add_option("--top-n", st.top_n, "Domains shown before 'other'")->capture_default_str();
  s_st->add_option("--out", st.out, "group,domain,weight CSV")->required();
  s_st->add_option("--domains-out", st.domains_out, "domain,weight,normalized CSV");
  AddCommon(s_st, &common);

  auto *s_pipe = app.add_subcommand("pipeline", "Run the step list of a manifest");
  s_pipe->add_option("--manifest", pipeline_manifest, "Manifest JSON")->required();

  try {
    if (!command.empty() && command != "pipeline") args = WithManifest(command, args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    PrintError(command, "usage", e.what());
    return kExitUsage;
  } catch (const UsageError &e) {
    PrintError(command, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (s_pipe->parsed()) {
      if (!allow_pipeline) throw UsageError("pipeline steps cannot run a pipeline");
      return RunPipeline(pipeline_manifest);
    }
    if (s_synth->parsed()) return RunSynth(synth, common);
    if (s_gmm->parsed()) return RunTrainGmm(gmm, common);
    if (s_quant->parsed()) return RunQuantize(quant, common);
    if (s_lda->parsed()) return RunTrainLda(lda, common);
    if (s_assign->parsed()) return RunAssign(assign, common);
    if (s_ent->parsed()) return RunEntropy(ent, common);
    if (s_filt->parsed()) return RunFilter(filt, common);
    if (s_at->parsed()) return RunAugmentTrain(at, common);
    if (s_ev->parsed()) return RunEval(ev, common);
    if (s_st->parsed()) return RunStats(st, common);
  } catch (const UsageError &e) {
    PrintError(command, "usage", e.what());
    return kExitUsage;
  } catch (const Error &e) {
    PrintError(command, std::string(ErrorCodeName(e.code())), e.what());
    return kExitData;
  } catch (const std::exception &e) {
    PrintError(command, "internal", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(std::move(args), true);
}
