// ldadnn/common.h

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

#ifndef LDADNN_COMMON_H_
#define LDADNN_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ldadnn {

enum class ErrorCode {
  kParse,
  kDimensionMismatch,
  kNonFinite,
  kDuplicateId,
  kOutOfRange,
  kPrecondition,
  kNumerical,
  kIdMismatch,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

/// All library failures are reported through this exception.  The code lets
/// callers (and tests) distinguish failure classes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ldadnn

#endif  // LDADNN_COMMON_H_
