/*
 * Copyright 2026 The GestureBridge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GESTUREBRIDGE_ERROR_HPP_
#define GESTUREBRIDGE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gb {

// Broad failure classes. The numeric values double as CLI exit codes.
enum class ErrorClass : int {
  kUsage = 1,
  kInput = 2,
  kTransport = 3,
  kSafety = 4,
};

// Fine-grained reason, reported in machine-readable error output.
enum class ErrorCode {
  kUsage,
  kConfig,
  kInput,
  kParse,
  kDimension,
  kOrdering,
  kEmptyInput,
  kMapping,
  kGeometry,
  kRouting,
  kMissingFixture,
  kConnectionRefused,
  kHttpStatus,
  kTimeout,
  kMalformedResponse,
  kSafety,
};

std::string_view ErrorCodeName(ErrorCode code);
ErrorClass ClassOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorClass error_class() const { return ClassOf(code_); }
  int exit_code() const { return static_cast<int>(error_class()); }

 private:
  ErrorCode code_;
};

// Parse errors carry the 1-based line number of the offending input line
// (0 when the error is not tied to a specific line).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(ErrorCode::kParse, line > 0 ? "line " + std::to_string(line) +
                                                ": " + message
                                          : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace gb

#endif  // GESTUREBRIDGE_ERROR_HPP_
