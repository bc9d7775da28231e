// ldadnn/io.h

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

// Small file helpers shared by the serializers.

#ifndef LDADNN_IO_H_
#define LDADNN_IO_H_

#include <functional>
#include <string>

#include "json.hpp"

namespace ldadnn {

using Json = nlohmann::json;

// Provenance stamped into artifacts written by the command-line tool.  JSON
// artifacts carry it under the "meta" key; jsonl artifacts as a first line
// {"meta": {...}} that readers skip; CSV artifacts as a leading "# " line.
struct ArtifactMeta {
  std::string stage;
  uint64_t seed = 0;
};

Json MetaToJson(const ArtifactMeta &meta);

// Writes to a temporary sibling file and renames it over `path`, so readers
// never observe a partially written artifact.
void WriteFileAtomic(const std::string &path, const std::string &content);

std::string ReadFile(const std::string &path);

// Calls `fn(line_number, object)` for every non-blank line of a jsonl file,
// skipping "meta" header lines.  Parse failures throw Error(kParse).
void ForEachJsonLine(const std::string &path,
                     const std::function<void(int, const Json &)> &fn);

// Parses one JSON document from a file.
Json ReadJsonFile(const std::string &path);

// Reads a JSON number, accepting the strings "nan"/"inf"/"-inf" (any case,
// also "Infinity") as the corresponding non-finite values so the caller can
// report them as such rather than as a syntax error.
double JsonToDouble(const Json &value);

// Doubles that cannot be represented in JSON (-inf log-probabilities) are
// written as null and read back as -inf.
Json LogProbToJson(double v);
double LogProbFromJson(const Json &v);

}  // namespace ldadnn

#endif  // LDADNN_IO_H_
