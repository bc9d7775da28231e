// ldadnn/corpus.cc

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

#include "ldadnn/corpus.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "ldadnn/common.h"
#include "ldadnn/rng.h"

namespace ldadnn {

namespace {

std::string Where(const std::string &id, int frame) {
  return "document '" + id + "' frame " + std::to_string(frame);
}

void CheckFinite(double v, const std::string &id, int frame) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::kNonFinite, "non-finite value in " + Where(id, frame));
}

// Tracks the shared frame dimension and id uniqueness while loading.
class LoadValidator {
 public:
  void Id(const std::string &id) {
    if (!seen_.insert(id).second)
      throw Error(ErrorCode::kDuplicateId, "duplicate document id '" + id + "'");
  }
  void Dim(int dim, const std::string &id, int frame) {
    if (dim_ < 0) {
      dim_ = dim;
    } else if (dim != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  Where(id, frame) + " has dimension " + std::to_string(dim) +
                      ", expected " + std::to_string(dim_));
    }
  }

 private:
  std::unordered_set<std::string> seen_;
  int dim_ = -1;
};

std::optional<std::string> GroupFromJson(const Json &obj) {
  auto it = obj.find("group");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(ErrorCode::kParse, "'group' must be a string");
  return it->get<std::string>();
}

std::string IdFromJson(const Json &obj, const std::string &path, int line) {
  auto it = obj.find("id");
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) +
                                       ": missing string field 'id'");
  return it->get<std::string>();
}

Json DocHeader(const std::string &id, const std::optional<std::string> &group) {
  Json obj;
  obj["id"] = id;
  if (group) obj["group"] = *group;
  return obj;
}

std::string MetaLine(const ArtifactMeta *meta) {
  if (!meta) return {};
  return Json{{"meta", MetaToJson(*meta)}}.dump() + "\n";
}

std::vector<FeatureDocument> LoadFeaturesJsonl(const std::string &path) {
  std::vector<FeatureDocument> docs;
  LoadValidator check;
  ForEachJsonLine(path, [&](int line, const Json &obj) {
    FeatureDocument doc;
    doc.id = IdFromJson(obj, path, line);
    check.Id(doc.id);
    doc.group = GroupFromJson(obj);
    auto frames = obj.find("frames");
    if (frames == obj.end() || !frames->is_array())
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) +
                                         ": missing array field 'frames'");
    const int T = static_cast<int>(frames->size());
    int D = 0;
    for (int t = 0; t < T; ++t) {
      const Json &row = (*frames)[t];
      if (!row.is_array())
        throw Error(ErrorCode::kParse, Where(doc.id, t) + " is not an array");
      const int dim = static_cast<int>(row.size());
      check.Dim(dim, doc.id, t);
      if (t == 0) {
        D = dim;
        doc.frames.resize(T, D);
      }
      for (int d = 0; d < D; ++d) {
        double v;
        try {
          v = JsonToDouble(row[d]);
        } catch (const Error &) {
          throw Error(ErrorCode::kParse,
                      Where(doc.id, t) + ": malformed value " + row[d].dump());
        }
        CheckFinite(v, doc.id, t);
        doc.frames(t, d) = v;
      }
    }
    if (auto labels = obj.find("labels"); labels != obj.end()) {
      if (!labels->is_array() || static_cast<int>(labels->size()) != T)
        throw Error(ErrorCode::kParse, "document '" + doc.id +
                                           "': 'labels' must have one entry per frame");
      for (const auto &l : *labels) {
        if (!l.is_number_integer() || l.get<int64_t>() < 0)
          throw Error(ErrorCode::kParse, "document '" + doc.id +
                                             "': labels must be non-negative integers");
        doc.labels.push_back(l.get<int>());
      }
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseCsvDouble(const std::string &cell, const std::string &id, int frame) {
  double v = 0.0;
  const char *begin = cell.data();
  const char *end = begin + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  // from_chars rejects a leading '+'.
  if (begin < end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec == std::errc::result_out_of_range) {
    // Overflowing literals are infinite values, not syntax errors.
    CheckFinite(std::numeric_limits<double>::infinity(), id, frame);
  }
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::kParse,
                Where(id, frame) + ": malformed value '" + cell + "'");
  return v;
}

std::vector<FeatureDocument> LoadFeaturesCsv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<FeatureDocument> docs;
  LoadValidator check;
  std::vector<std::vector<double>> rows;  // rows of the document being read

  auto flush = [&]() {
    if (docs.empty() || rows.empty()) return;
    FeatureDocument &doc = docs.back();
    doc.frames.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (size_t t = 0; t < rows.size(); ++t)
      for (size_t d = 0; d < rows[t].size(); ++d) doc.frames(t, d) = rows[t][d];
    rows.clear();
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = SplitCsv(line);
    if (line_no == 1 || (docs.empty() && rows.empty())) {
      if (!cells.empty() && cells[0] == "id") continue;
    }
    if (cells.size() < 3)
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                         ": expected id,group,frame_index,...");
    const std::string &id = cells[0];
    int frame_index = -1;
    {
      auto [ptr, ec] = std::from_chars(cells[2].data(),
                                       cells[2].data() + cells[2].size(), frame_index);
      if (ec != std::errc() || ptr != cells[2].data() + cells[2].size())
        throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                           ": malformed frame_index '" + cells[2] + "'");
    }
    if (docs.empty() || docs.back().id != id) {
      flush();
      check.Id(id);
      FeatureDocument doc;
      doc.id = id;
      if (!cells[1].empty()) doc.group = cells[1];
      docs.push_back(std::move(doc));
    }
    if (frame_index != static_cast<int>(rows.size()))
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                         ": frame_index " + cells[2] + " out of sequence for '" +
                                         id + "'");
    const int dim = static_cast<int>(cells.size()) - 3;
    check.Dim(dim, id, frame_index);
    std::vector<double> row(dim);
    for (int d = 0; d < dim; ++d) {
      row[d] = ParseCsvDouble(cells[3 + d], id, frame_index);
      CheckFinite(row[d], id, frame_index);
    }
    rows.push_back(std::move(row));
  }
  flush();
  return docs;
}

void AppendDouble(std::string *out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out->append(buf);
}

}  // namespace

FeatureFormat FeatureFormatFromPath(const std::string &path) {
  const std::string ext = ".csv";
  if (path.size() >= ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
    return FeatureFormat::kCsv;
  return FeatureFormat::kJsonl;
}

std::vector<FeatureDocument> LoadFeatures(const std::string &path,
                                          FeatureFormat format) {
  return format == FeatureFormat::kCsv ? LoadFeaturesCsv(path)
                                       : LoadFeaturesJsonl(path);
}

void SaveFeatures(const std::string &path,
                  const std::vector<FeatureDocument> &docs,
                  FeatureFormat format, const ArtifactMeta *meta) {
  std::string out;
  if (format == FeatureFormat::kJsonl) {
    out += MetaLine(meta);
    for (const auto &doc : docs) {
      Json obj = DocHeader(doc.id, doc.group);
      Json frames = Json::array();
      for (int t = 0; t < doc.NumFrames(); ++t) {
        Json row = Json::array();
        for (int d = 0; d < doc.Dim(); ++d) row.push_back(doc.frames(t, d));
        frames.push_back(std::move(row));
      }
      obj["frames"] = std::move(frames);
      if (!doc.labels.empty()) obj["labels"] = doc.labels;
      out += obj.dump();
      out += '\n';
    }
  } else {
    if (meta) out += "# " + MetaToJson(*meta).dump() + "\n";
    const int D = docs.empty() ? 0 : docs.front().Dim();
    out += "id,group,frame_index";
    for (int d = 0; d < D; ++d) out += ",f" + std::to_string(d);
    out += '\n';
    for (const auto &doc : docs) {
      const std::string group = doc.group.value_or("");
      if (doc.id.find(',') != std::string::npos ||
          group.find(',') != std::string::npos)
        throw Error(ErrorCode::kPrecondition,
                    "CSV ids and groups may not contain commas: '" + doc.id + "'");
      for (int t = 0; t < doc.NumFrames(); ++t) {
        out += doc.id + "," + group + "," + std::to_string(t);
        for (int d = 0; d < doc.Dim(); ++d) {
          out += ',';
          AppendDouble(&out, doc.frames(t, d));
        }
        out += '\n';
      }
    }
  }
  WriteFileAtomic(path, out);
}

std::vector<SymbolDocument> LoadSymbols(const std::string &path) {
  std::vector<SymbolDocument> docs;
  LoadValidator check;
  ForEachJsonLine(path, [&](int line, const Json &obj) {
    SymbolDocument doc;
    doc.id = IdFromJson(obj, path, line);
    check.Id(doc.id);
    doc.group = GroupFromJson(obj);
    auto symbols = obj.find("symbols");
    if (symbols == obj.end() || !symbols->is_array())
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) +
                                         ": missing array field 'symbols'");
    for (const auto &s : *symbols) {
      if (!s.is_number_integer() || s.get<int64_t>() < 0)
        throw Error(ErrorCode::kParse, "document '" + doc.id +
                                           "': symbols must be non-negative integers");
      doc.symbols.push_back(s.get<int32_t>());
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

void SaveSymbols(const std::string &path,
                 const std::vector<SymbolDocument> &docs,
                 const ArtifactMeta *meta) {
  std::string out = MetaLine(meta);
  for (const auto &doc : docs) {
    Json obj = DocHeader(doc.id, doc.group);
    obj["symbols"] = doc.symbols;
    out += obj.dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

std::vector<BagOfSounds> LoadBags(const std::string &path) {
  std::vector<BagOfSounds> bags;
  LoadValidator check;
  int vocab = -1;
  ForEachJsonLine(path, [&](int line, const Json &obj) {
    BagOfSounds bag;
    bag.id = IdFromJson(obj, path, line);
    check.Id(bag.id);
    bag.group = GroupFromJson(obj);
    auto counts = obj.find("counts");
    if (counts == obj.end() || !counts->is_array())
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line) +
                                         ": missing array field 'counts'");
    for (const auto &c : *counts) {
      if (!c.is_number_integer() || c.get<int64_t>() < 0)
        throw Error(ErrorCode::kParse, "document '" + bag.id +
                                           "': counts must be non-negative integers");
      bag.counts.push_back(c.get<int64_t>());
      bag.total += bag.counts.back();
    }
    if (vocab < 0) vocab = bag.VocabSize();
    if (bag.VocabSize() != vocab)
      throw Error(ErrorCode::kDimensionMismatch,
                  "document '" + bag.id + "' has vocabulary size " +
                      std::to_string(bag.VocabSize()) + ", expected " +
                      std::to_string(vocab));
    bags.push_back(std::move(bag));
  });
  return bags;
}

void SaveBags(const std::string &path, const std::vector<BagOfSounds> &bags,
              const ArtifactMeta *meta) {
  std::string out = MetaLine(meta);
  for (const auto &bag : bags) {
    Json obj = DocHeader(bag.id, bag.group);
    obj["counts"] = bag.counts;
    out += obj.dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

BagOfSounds ToBag(const SymbolDocument &doc, int vocab_size) {
  if (vocab_size < 1)
    throw Error(ErrorCode::kPrecondition, "vocabulary size must be >= 1");
  BagOfSounds bag;
  bag.id = doc.id;
  bag.group = doc.group;
  bag.counts.assign(vocab_size, 0);
  for (int32_t s : doc.symbols) {
    if (s < 0 || s >= vocab_size)
      throw Error(ErrorCode::kOutOfRange,
                  "document '" + doc.id + "': symbol " + std::to_string(s) +
                      " outside vocabulary of size " + std::to_string(vocab_size));
    ++bag.counts[s];
  }
  bag.total = static_cast<int64_t>(doc.symbols.size());
  return bag;
}

FrameMatrix PoolFrames(const std::vector<FeatureDocument> &docs) {
  Eigen::Index rows = 0;
  Eigen::Index dim = -1;
  for (const auto &doc : docs) {
    if (doc.NumFrames() == 0) continue;
    if (dim >= 0 && doc.Dim() != dim)
      throw Error(ErrorCode::kDimensionMismatch,
                  "document '" + doc.id + "' has a different frame dimension");
    dim = doc.Dim();
    rows += doc.NumFrames();
  }
  FrameMatrix pooled(rows, std::max<Eigen::Index>(dim, 0));
  Eigen::Index r = 0;
  for (const auto &doc : docs) {
    if (doc.NumFrames() == 0) continue;
    pooled.middleRows(r, doc.NumFrames()) = doc.frames;
    r += doc.NumFrames();
  }
  return pooled;
}

SyntheticLdaCorpus SampleSyntheticLdaCorpus(
    double alpha, const std::vector<std::vector<double>> &beta, int num_docs,
    int doc_len, uint64_t seed) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::kPrecondition, "alpha must be positive");
  if (beta.empty())
    throw Error(ErrorCode::kPrecondition, "beta must have at least one row");
  if (num_docs < 1 || doc_len < 1)
    throw Error(ErrorCode::kPrecondition, "num_docs and doc_len must be >= 1");
  const size_t V = beta.front().size();
  for (size_t k = 0; k < beta.size(); ++k) {
    if (beta[k].size() != V)
      throw Error(ErrorCode::kDimensionMismatch, "beta rows differ in length");
    double sum = 0.0;
    for (double p : beta[k]) {
      if (!(p >= 0.0))
        throw Error(ErrorCode::kPrecondition, "beta entries must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw Error(ErrorCode::kPrecondition,
                  "beta row " + std::to_string(k) + " is not stochastic (sums to " +
                      std::to_string(sum) + ")");
  }

  const int K = static_cast<int>(beta.size());
  const std::vector<double> alpha_vec(K, alpha);
  Rng rng(seed);
  SyntheticLdaCorpus corpus;
  corpus.docs.reserve(num_docs);
  corpus.thetas.reserve(num_docs);
  char id[32];
  for (int m = 0; m < num_docs; ++m) {
    std::vector<double> theta = K == 1 ? std::vector<double>{1.0}
                                       : rng.Dirichlet(alpha_vec);
    SymbolDocument doc;
    std::snprintf(id, sizeof(id), "doc%06d", m);
    doc.id = id;
    doc.symbols.resize(doc_len);
    for (int n = 0; n < doc_len; ++n) {
      const int z = K == 1 ? 0 : rng.Categorical(theta);
      doc.symbols[n] = rng.Categorical(beta[z]);
    }
    corpus.docs.push_back(std::move(doc));
    corpus.thetas.push_back(std::move(theta));
  }
  return corpus;
}

std::vector<SymbolDocument> GenerateSyntheticLdaCorpus(
    double alpha, const std::vector<std::vector<double>> &beta, int num_docs,
    int doc_len, uint64_t seed) {
  return SampleSyntheticLdaCorpus(alpha, beta, num_docs, doc_len, seed).docs;
}

}  // namespace ldadnn
