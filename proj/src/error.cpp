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

#include "credx/error.hpp"

namespace credx {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kRowWidthMismatch: return "RowWidthMismatch";
    case ErrorCode::kUnknownTargetLabel: return "UnknownTargetLabel";
    case ErrorCode::kAllColumnsDropped: return "AllColumnsDropped";
    case ErrorCode::kDegenerateTable: return "DegenerateTable";
    case ErrorCode::kUnknownLevel: return "UnknownLevel";
    case ErrorCode::kEmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::kUnseenLevel: return "UnseenLevel";
    case ErrorCode::kClassAbsent: return "ClassAbsent";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotAnSvm: return "NotAnSvm";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotTreeBased: return "NotTreeBased";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kConstantFeature: return "ConstantFeature";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kFormat: return "Format";
    case ErrorCode::kLocalAccuracy: return "LocalAccuracy";
  }
  return "Unknown";
}

}  // namespace credx
