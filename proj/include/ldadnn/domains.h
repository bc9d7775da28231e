// ldadnn/domains.h

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

// Hard domain assignments from LDA posteriors, one-hot domain codes, and the
// corpus-level diagnostics built on them.

#ifndef LDADNN_DOMAINS_H_
#define LDADNN_DOMAINS_H_

#include <map>
#include <string>
#include <vector>

#include "ldadnn/corpus.h"
#include "ldadnn/io.h"
#include "ldadnn/lda.h"

namespace ldadnn {

struct DomainAssignment {
  std::string doc_id;
  int num_domains = 0;
  int map_domain = 0;  // argmax(theta), lowest index on ties
  std::vector<double> theta;
  double weight = 0.0;  // token count unless the caller says otherwise
};

// Builds an assignment from a posterior, checking that theta sums to 1
// (within 1e-9) and deriving map_domain.
DomainAssignment MakeAssignment(std::string doc_id, std::vector<double> theta,
                                double weight);

// One assignment per document, in corpus order; weight = token count.
// Empty documents get a uniform theta (and domain 0).
std::vector<DomainAssignment> Assign(const LdaModel &model,
                                     const std::vector<BagOfSounds> &corpus,
                                     const LdaConfig &config = {});

// Exactly one entry is 1.
struct UbicVector {
  std::vector<double> code;
  int NumDomains() const { return static_cast<int>(code.size()); }
  int Index() const;
};

UbicVector UbicEncode(const DomainAssignment &assignment);
UbicVector UbicFromIndex(int domain, int num_domains);

enum class EntropyUnit { kBits, kNats };

// Mean over documents of the entropy of theta.
double AverageDomainEntropy(const std::vector<DomainAssignment> &assignments,
                            EntropyUnit unit = EntropyUnit::kBits);

struct TupleBin {
  int domain_a = 0;
  int domain_b = 0;
  double weight = 0.0;
  double normalized = 0.0;  // weight / total corpus weight
  int num_docs = 0;
};

struct FilterResult {
  int num_domains_a = 0;
  int num_domains_b = 0;
  // Every (a, b) pair, indexed a * num_domains_b + b, so its size is the
  // Cartesian product num_domains_a * num_domains_b.
  std::vector<TupleBin> histogram;
  // Tuples kept, best first.
  std::vector<int> kept_tuples;
  // Ids in the order of the first assignment list.
  std::vector<std::string> kept_ids;
  int cutoff_tuple = -1;  // the last (lowest-ranked) kept tuple
  double kept_weight = 0.0;
  double total_weight = 0.0;
  double target_weight = 0.0;
};

// Ranks (map domain under A, map domain under B) tuples by total document
// weight, descending with ties broken by ascending tuple index, and keeps
// whole tuples until the kept weight first reaches target_weight.
// Document weights are taken from `assign_a`.
FilterResult CrossAgreementFilter(const std::vector<DomainAssignment> &assign_a,
                                  const std::vector<DomainAssignment> &assign_b,
                                  double target_weight);

struct DistributionRow {
  std::string group;
  std::string domain;  // decimal index or "other"
  double weight = 0.0;
};

// Per-group weight over the top_n domains (ranked by total weight over the
// whole corpus, ties by index) plus one "other" row when more than top_n
// domains exist.  Every group gets a row for every category, so each
// group's rows sum to its total weight.  Groups appear in sorted order.
std::vector<DistributionRow> DistributionStats(
    const std::vector<DomainAssignment> &assignments,
    const std::map<std::string, std::string> &group_of, int top_n);

// Total weight per domain, all K domains.
std::vector<double> DomainWeights(const std::vector<DomainAssignment> &assignments);

// jsonl: {"id", "K", "theta", "map_domain", "weight"}.
void SaveAssignments(const std::string &path,
                     const std::vector<DomainAssignment> &assignments,
                     const ArtifactMeta *meta = nullptr);
std::vector<DomainAssignment> LoadAssignments(const std::string &path);

// jsonl: a summary line {"summary": {...}}, one {"tuple", "domain_a",
// "domain_b", "weight", "normalized", "docs"} line per non-empty tuple, and one
// {"id", "kept"} line per document.
void SaveFilterResult(const std::string &path, const FilterResult &result,
                      const std::vector<DomainAssignment> &assign_a,
                      const ArtifactMeta *meta = nullptr);

// CSV "group,domain,weight".
std::string DistributionCsv(const std::vector<DistributionRow> &rows,
                            const ArtifactMeta *meta = nullptr);

}  // namespace ldadnn

#endif  // LDADNN_DOMAINS_H_
