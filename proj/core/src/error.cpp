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

#include "gesturebridge/error.hpp"

namespace gb {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInput: return "input";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kOrdering: return "ordering";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kMapping: return "mapping";
    case ErrorCode::kGeometry: return "geometry";
    case ErrorCode::kRouting: return "routing";
    case ErrorCode::kMissingFixture: return "missing_fixture";
    case ErrorCode::kConnectionRefused: return "connection_refused";
    case ErrorCode::kHttpStatus: return "http_status";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kSafety: return "safety";
  }
  return "unknown";
}

ErrorClass ClassOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return ErrorClass::kUsage;
    case ErrorCode::kConnectionRefused:
    case ErrorCode::kHttpStatus:
    case ErrorCode::kTimeout:
    case ErrorCode::kMalformedResponse:
      return ErrorClass::kTransport;
    case ErrorCode::kSafety:
      return ErrorClass::kSafety;
    default:
      return ErrorClass::kInput;
  }
}

}  // namespace gb
