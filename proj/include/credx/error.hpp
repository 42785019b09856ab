// Copyright 2026 The Credx Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credx {

enum class ErrorCode {
  kMissingColumn,
  kRowWidthMismatch,
  kUnknownTargetLabel,
  kAllColumnsDropped,
  kDegenerateTable,
  kUnknownLevel,
  kEmptyAfterFilter,
  kUnseenLevel,
  kClassAbsent,
  kNonFinite,
  kNotAnSvm,
  kShapeMismatch,
  kNotTreeBased,
  kSingularSystem,
  kDomainError,
  kTooManyFeatures,
  kConstantFeature,
  kInvalidArgument,
  kIo,
  kFormat,
  kLocalAccuracy,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying a
// stable code; the CLI turns the code into a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace credx
