// ldadnn/corpus.h

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

// Acoustic documents at the three stages of the pipeline: raw feature frames,
// quantized symbol sequences and bag-of-sounds count vectors.

#ifndef LDADNN_CORPUS_H_
#define LDADNN_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldadnn/io.h"

namespace ldadnn {

// One frame per row.
using FrameMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureDocument {
  std::string id;
  std::optional<std::string> group;  // genre/show; metadata only
  FrameMatrix frames;                // T x D
  // Optional per-frame class targets (the alignment used for network
  // training).  Either empty or of length T.
  std::vector<int> labels;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

struct SymbolDocument {
  std::string id;
  std::optional<std::string> group;
  std::vector<int32_t> symbols;
};

struct BagOfSounds {
  std::string id;
  std::optional<std::string> group;
  std::vector<int64_t> counts;  // length V
  int64_t total = 0;

  int VocabSize() const { return static_cast<int>(counts.size()); }
};

enum class FeatureFormat { kCsv, kJsonl };

// Picks the format from the extension (.csv or anything else -> jsonl).
FeatureFormat FeatureFormatFromPath(const std::string &path);

// Loads documents in file order.  Enforces a single frame dimension across
// the file, finite values and unique ids.
//
// jsonl: one object per line, {"id": ..., "group": ..., "frames": [[...]],
//        "labels": [...]}; "group" and "labels" may be absent.
// csv:   rows "id,group,frame_index,f0,...,fD-1"; an optional header row
//        starting with "id" is skipped; a document's rows must be contiguous
//        with frame_index counting up from 0; an empty group means none.
std::vector<FeatureDocument> LoadFeatures(const std::string &path,
                                          FeatureFormat format);
void SaveFeatures(const std::string &path,
                  const std::vector<FeatureDocument> &docs,
                  FeatureFormat format, const ArtifactMeta *meta = nullptr);

// {"id", "group", "symbols": [...]} per line.
std::vector<SymbolDocument> LoadSymbols(const std::string &path);
void SaveSymbols(const std::string &path,
                 const std::vector<SymbolDocument> &docs,
                 const ArtifactMeta *meta = nullptr);

// {"id", "group", "counts": [...]} per line; "total" is recomputed on load.
std::vector<BagOfSounds> LoadBags(const std::string &path);
void SaveBags(const std::string &path, const std::vector<BagOfSounds> &bags,
              const ArtifactMeta *meta = nullptr);

BagOfSounds ToBag(const SymbolDocument &doc, int vocab_size);

// All frames of all documents stacked in document order.
FrameMatrix PoolFrames(const std::vector<FeatureDocument> &docs);

// Draws documents from the LDA generative process: per document
// theta ~ Dir(alpha), then for each token z ~ Mult(theta), w ~ Mult(beta[z]).
// `beta` is K rows over V symbols.  Also returns each document's theta so
// tests can compare against the generating topics.
struct SyntheticLdaCorpus {
  std::vector<SymbolDocument> docs;
  std::vector<std::vector<double>> thetas;
};
SyntheticLdaCorpus SampleSyntheticLdaCorpus(
    double alpha, const std::vector<std::vector<double>> &beta, int num_docs,
    int doc_len, uint64_t seed);

std::vector<SymbolDocument> GenerateSyntheticLdaCorpus(
    double alpha, const std::vector<std::vector<double>> &beta, int num_docs,
    int doc_len, uint64_t seed);

}  // namespace ldadnn

#endif  // LDADNN_CORPUS_H_
