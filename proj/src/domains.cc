// ldadnn/domains.cc

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

#include "ldadnn/domains.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "ldadnn/common.h"
#include "ldadnn/math.h"

namespace ldadnn {

DomainAssignment MakeAssignment(std::string doc_id, std::vector<double> theta,
                                double weight) {
  if (theta.empty())
    throw Error(ErrorCode::kPrecondition, "theta for '" + doc_id + "' is empty");
  double sum = 0.0;
  for (double t : theta) {
    if (!(t >= 0.0))
      throw Error(ErrorCode::kPrecondition,
                  "theta for '" + doc_id + "' has a negative or NaN entry");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::kPrecondition,
                "theta for '" + doc_id + "' does not sum to 1");
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw Error(ErrorCode::kPrecondition,
                "weight for '" + doc_id + "' must be finite and non-negative");
  DomainAssignment a;
  a.doc_id = std::move(doc_id);
  a.num_domains = static_cast<int>(theta.size());
  a.map_domain = ArgMax(theta);
  a.theta = std::move(theta);
  a.weight = weight;
  return a;
}

std::vector<DomainAssignment> Assign(const LdaModel &model,
                                     const std::vector<BagOfSounds> &corpus,
                                     const LdaConfig &config) {
  if (corpus.empty()) throw Error(ErrorCode::kPrecondition, "corpus is empty");
  std::vector<DomainAssignment> out;
  out.reserve(corpus.size());
  for (const auto &doc : corpus) {
    ThetaEstimate est = InferTheta(model, doc, config);
    out.push_back(MakeAssignment(doc.id, std::move(est.theta),
                                 static_cast<double>(doc.total)));
  }
  return out;
}

int UbicVector::Index() const {
  return static_cast<int>(std::find(code.begin(), code.end(), 1.0) - code.begin());
}

UbicVector UbicFromIndex(int domain, int num_domains) {
  if (num_domains < 1 || domain < 0 || domain >= num_domains)
    throw Error(ErrorCode::kOutOfRange,
                "domain " + std::to_string(domain) + " outside [0, " +
                    std::to_string(num_domains) + ")");
  UbicVector v;
  v.code.assign(num_domains, 0.0);
  v.code[domain] = 1.0;
  return v;
}

UbicVector UbicEncode(const DomainAssignment &assignment) {
  return UbicFromIndex(assignment.map_domain, assignment.num_domains);
}

double AverageDomainEntropy(const std::vector<DomainAssignment> &assignments,
                            EntropyUnit unit) {
  if (assignments.empty())
    throw Error(ErrorCode::kPrecondition, "no assignments to average over");
  double sum = 0.0;
  for (const auto &a : assignments) sum += EntropyNats(a.theta);
  double mean = sum / static_cast<double>(assignments.size());
  if (unit == EntropyUnit::kBits) mean /= std::log(2.0);
  return mean;
}

namespace {

int CommonDomainCount(const std::vector<DomainAssignment> &assignments,
                      const char *which) {
  if (assignments.empty())
    throw Error(ErrorCode::kPrecondition, std::string("assignment list ") + which +
                                              " is empty");
  const int K = assignments.front().num_domains;
  for (const auto &a : assignments)
    if (a.num_domains != K || a.map_domain < 0 || a.map_domain >= K)
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string("assignment list ") + which +
                      " mixes domain counts or has an invalid map domain");
  if (K < 1)
    throw Error(ErrorCode::kPrecondition, "assignments need at least one domain");
  return K;
}

}  // namespace

FilterResult CrossAgreementFilter(const std::vector<DomainAssignment> &assign_a,
                                  const std::vector<DomainAssignment> &assign_b,
                                  double target_weight) {
  if (!(target_weight > 0.0))
    throw Error(ErrorCode::kPrecondition, "target weight must be positive");
  const int Ka = CommonDomainCount(assign_a, "A");
  const int Kb = CommonDomainCount(assign_b, "B");
  if (assign_a.size() != assign_b.size())
    throw Error(ErrorCode::kIdMismatch, "assignment lists cover different documents");

  std::unordered_map<std::string, size_t> index_b;
  for (size_t i = 0; i < assign_b.size(); ++i)
    if (!index_b.emplace(assign_b[i].doc_id, i).second)
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate id '" + assign_b[i].doc_id + "' in assignment list B");

  FilterResult result;
  result.num_domains_a = Ka;
  result.num_domains_b = Kb;
  result.target_weight = target_weight;
  result.histogram.resize(static_cast<size_t>(Ka) * Kb);
  for (int a = 0; a < Ka; ++a)
    for (int b = 0; b < Kb; ++b) {
      result.histogram[a * Kb + b].domain_a = a;
      result.histogram[a * Kb + b].domain_b = b;
    }

  std::vector<int> tuple_of(assign_a.size());
  std::unordered_map<std::string, bool> seen_a;
  for (size_t i = 0; i < assign_a.size(); ++i) {
    const auto &a = assign_a[i];
    if (!seen_a.emplace(a.doc_id, true).second)
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate id '" + a.doc_id + "' in assignment list A");
    auto it = index_b.find(a.doc_id);
    if (it == index_b.end())
      throw Error(ErrorCode::kIdMismatch,
                  "document '" + a.doc_id + "' is missing from assignment list B");
    const int tuple = a.map_domain * Kb + assign_b[it->second].map_domain;
    tuple_of[i] = tuple;
    result.histogram[tuple].weight += a.weight;
    result.histogram[tuple].num_docs += 1;
    result.total_weight += a.weight;
  }
  if (target_weight > result.total_weight * (1.0 + 1e-12))
    throw Error(ErrorCode::kPrecondition,
                "target weight exceeds the total corpus weight");
  for (auto &bin : result.histogram)
    bin.normalized = result.total_weight > 0.0 ? bin.weight / result.total_weight : 0.0;

  std::vector<int> order;
  for (int t = 0; t < Ka * Kb; ++t)
    if (result.histogram[t].num_docs > 0) order.push_back(t);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return result.histogram[x].weight > result.histogram[y].weight;
  });

  std::vector<bool> keep(static_cast<size_t>(Ka) * Kb, false);
  for (int t : order) {
    keep[t] = true;
    result.kept_tuples.push_back(t);
    result.kept_weight += result.histogram[t].weight;
    result.cutoff_tuple = t;
    if (result.kept_weight >= target_weight) break;
  }
  for (size_t i = 0; i < assign_a.size(); ++i)
    if (keep[tuple_of[i]]) result.kept_ids.push_back(assign_a[i].doc_id);
  return result;
}

std::vector<double> DomainWeights(const std::vector<DomainAssignment> &assignments) {
  const int K = CommonDomainCount(assignments, "");
  std::vector<double> weights(K, 0.0);
  for (const auto &a : assignments) weights[a.map_domain] += a.weight;
  return weights;
}

std::vector<DistributionRow> DistributionStats(
    const std::vector<DomainAssignment> &assignments,
    const std::map<std::string, std::string> &group_of, int top_n) {
  if (top_n < 0) throw Error(ErrorCode::kPrecondition, "top_n must be >= 0");
  const std::vector<double> totals = DomainWeights(assignments);
  const int K = static_cast<int>(totals.size());

  std::vector<int> ranked(K);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](int x, int y) { return totals[x] > totals[y]; });
  const int shown = std::min(top_n, K);
  const bool has_other = K > shown;
  std::vector<int> category(K, shown);  // index `shown` is "other"
  for (int r = 0; r < shown; ++r) category[ranked[r]] = r;

  std::map<std::string, std::vector<double>> per_group;
  for (const auto &a : assignments) {
    auto it = group_of.find(a.doc_id);
    if (it == group_of.end())
      throw Error(ErrorCode::kPrecondition,
                  "document '" + a.doc_id + "' has no group mapping");
    auto &row = per_group[it->second];
    if (row.empty()) row.assign(shown + 1, 0.0);
    row[category[a.map_domain]] += a.weight;
  }

  std::vector<DistributionRow> rows;
  for (const auto &[group, weights] : per_group) {
    for (int r = 0; r < shown; ++r)
      rows.push_back({group, std::to_string(ranked[r]), weights[r]});
    if (has_other) rows.push_back({group, "other", weights[shown]});
  }
  return rows;
}

void SaveAssignments(const std::string &path,
                     const std::vector<DomainAssignment> &assignments,
                     const ArtifactMeta *meta) {
  std::string out;
  if (meta) out += Json{{"meta", MetaToJson(*meta)}}.dump() + "\n";
  for (const auto &a : assignments) {
    Json obj{{"id", a.doc_id},
             {"K", a.num_domains},
             {"theta", a.theta},
             {"map_domain", a.map_domain},
             {"weight", a.weight}};
    out += obj.dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

std::vector<DomainAssignment> LoadAssignments(const std::string &path) {
  std::vector<DomainAssignment> out;
  ForEachJsonLine(path, [&](int line, const Json &obj) {
    try {
      std::vector<double> theta;
      for (const auto &t : obj.at("theta")) theta.push_back(JsonToDouble(t));
      const double weight = obj.contains("weight") ? JsonToDouble(obj["weight"]) : 1.0;
      DomainAssignment a =
          MakeAssignment(obj.at("id").get<std::string>(), std::move(theta), weight);
      if (obj.contains("map_domain") && obj["map_domain"].get<int>() != a.map_domain)
        throw Error(ErrorCode::kParse,
                    "map_domain of '" + a.doc_id + "' disagrees with its theta");
      out.push_back(std::move(a));
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) +
                                         ": malformed assignment: " + e.what());
    }
  });
  return out;
}

void SaveFilterResult(const std::string &path, const FilterResult &result,
                      const std::vector<DomainAssignment> &assign_a,
                      const ArtifactMeta *meta) {
  std::string out;
  if (meta) out += Json{{"meta", MetaToJson(*meta)}}.dump() + "\n";
  Json summary{{"K_a", result.num_domains_a},
               {"K_b", result.num_domains_b},
               {"num_tuples", result.histogram.size()},
               {"target_weight", result.target_weight},
               {"kept_weight", result.kept_weight},
               {"total_weight", result.total_weight},
               {"kept_docs", result.kept_ids.size()},
               {"kept_tuples", result.kept_tuples.size()}};
  if (result.cutoff_tuple >= 0) {
    const auto &bin = result.histogram[result.cutoff_tuple];
    summary["cutoff"] = {{"tuple", result.cutoff_tuple},
                         {"domain_a", bin.domain_a},
                         {"domain_b", bin.domain_b},
                         {"weight", bin.weight},
                         {"normalized", bin.normalized}};
  }
  out += Json{{"summary", summary}}.dump() + "\n";
  for (size_t t = 0; t < result.histogram.size(); ++t) {
    const auto &bin = result.histogram[t];
    if (bin.num_docs == 0) continue;
    out += Json{{"tuple", t},
                {"domain_a", bin.domain_a},
                {"domain_b", bin.domain_b},
                {"weight", bin.weight},
                {"normalized", bin.normalized},
                {"docs", bin.num_docs}}
               .dump();
    out += '\n';
  }
  std::unordered_map<std::string, bool> kept;
  for (const auto &id : result.kept_ids) kept[id] = true;
  for (const auto &a : assign_a) {
    out += Json{{"id", a.doc_id}, {"kept", kept.count(a.doc_id) > 0}}.dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

std::string DistributionCsv(const std::vector<DistributionRow> &rows,
                            const ArtifactMeta *meta) {
  std::string out;
  if (meta) out += "# " + MetaToJson(*meta).dump() + "\n";
  out += "group,domain,weight\n";
  char buf[32];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.weight);
    out += r.group + "," + r.domain + "," + buf + "\n";
  }
  return out;
}

}  // namespace ldadnn
