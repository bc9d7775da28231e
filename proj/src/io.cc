// ldadnn/io.cc

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

#include "ldadnn/io.h"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldadnn/common.h"

namespace ldadnn {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kIdMismatch: return "id_mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Json MetaToJson(const ArtifactMeta &meta) {
  return Json{{"stage", meta.stage}, {"seed", meta.seed}};
}

void WriteFileAtomic(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename " + tmp + " to " + path);
  }
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ForEachJsonLine(const std::string &path,
                     const std::function<void(int, const Json &)> &fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); }))
      continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::parse_error &e) {
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                         ": malformed JSON: " + e.what());
    }
    if (!obj.is_object())
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                         ": expected a JSON object");
    if (obj.contains("meta") && obj.size() == 1) continue;
    fn(line_no, obj);
  }
}

Json ReadJsonFile(const std::string &path) {
  const std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kParse, path + ": malformed JSON: " + e.what());
  }
}

double JsonToDouble(const Json &value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "infinity" || s == "+inf")
      return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity")
      return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::kParse, "expected a number, got " + value.dump());
}

Json LogProbToJson(double v) {
  if (std::isinf(v) && v < 0) return nullptr;
  return v;
}

double LogProbFromJson(const Json &v) {
  if (v.is_null()) return -std::numeric_limits<double>::infinity();
  if (!v.is_number())
    throw Error(ErrorCode::kParse, "expected a log-probability, got " + v.dump());
  return v.get<double>();
}

}  // namespace ldadnn
