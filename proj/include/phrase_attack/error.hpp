//
// Copyright 2026 The phrase-attack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phrase_attack {

enum class ErrorCode {
  kEmptyText,
  kSpanOutOfRange,
  kInvalidArgument,
  kMalformedTree,
  kTokenMismatch,
  kBackendUnavailable,
  kProtocolError,
  kUnknownLabel,
  kIncompleteLikelihoods,
  kEmptyCandidateSet,
  kParseError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Inverse of ErrorCodeName; unknown names map to kProtocolError.
ErrorCode ErrorCodeFromName(std::string_view name);

// Single exception type for the engine. The code distinguishes the failure
// classes callers react to (e.g. retrying on kBackendUnavailable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace phrase_attack
