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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace credx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // data or model error
inline constexpr int kExitUsage = 2;

inline constexpr int kManifestSchemaVersion = 1;

// Environment variable naming the directory for defaulted artifact paths.
inline constexpr const char* kArtifactRootEnv = "CREDX_ARTIFACT_ROOT";

// Runs one subcommand. `args` excludes the program name. Failures print a
// JSON error record on `err` and return a nonzero status.
int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Every recognised configuration key with its default value. Config files
// are flat JSON objects over these keys.
const nlohmann::json& ConfigDefaults();

std::uint64_t Fnv1a(std::string_view bytes);
std::string Fnv1aHex(std::string_view bytes);
std::string HashFile(const std::filesystem::path& path);

}  // namespace credx::cli
