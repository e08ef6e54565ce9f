//
// Copyright 2026 The gazedp Authors
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

namespace gazedp {

enum class ErrorCode {
  kInvalidParameter,
  kUnsupportedForGaussian,
  kDegenerateInput,
  kUndefinedCorrelation,
  kInsufficientTrials,
  kParse,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
      return "invalid-parameter";
    case ErrorCode::kUnsupportedForGaussian:
      return "unsupported-for-gaussian";
    case ErrorCode::kDegenerateInput:
      return "degenerate-input";
    case ErrorCode::kUndefinedCorrelation:
      return "undefined-correlation";
    case ErrorCode::kInsufficientTrials:
      return "insufficient-trials";
    case ErrorCode::kParse:
      return "parse-error";
    case ErrorCode::kIo:
      return "io-error";
  }
  return "unknown";
}

// All library failures are reported through this exception type. The code
// lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void Require(bool condition, const std::string& message,
                    ErrorCode code = ErrorCode::kInvalidParameter) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace gazedp
