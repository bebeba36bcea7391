// Copyright 2026 The Privsynth Authors
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

#ifndef PRIVSYNTH_COMMON_JSON_UTIL_H_
#define PRIVSYNTH_COMMON_JSON_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace privsynth {

using Json = nlohmann::json;

// Parses without exceptions; errors are schema violations naming `what`.
absl::StatusOr<Json> ParseJson(std::string_view text, std::string_view what);
absl::StatusOr<Json> ReadJsonFile(const std::filesystem::path& path);
absl::Status WriteJsonFile(const std::filesystem::path& path, const Json& doc);
absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view text);
absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path);

// Typed field access. `path` is the JSON path of `object`, used in errors
// such as "images[2].segments[0].payload: missing field".
absl::StatusOr<const Json*> RequireField(const Json& object,
                                         std::string_view key,
                                         std::string_view path);
absl::StatusOr<std::string> GetString(const Json& object, std::string_view key,
                                      std::string_view path);
absl::StatusOr<double> GetNumber(const Json& object, std::string_view key,
                                 std::string_view path);
absl::StatusOr<int64_t> GetInt(const Json& object, std::string_view key,
                               std::string_view path);
absl::StatusOr<uint64_t> GetUint(const Json& object, std::string_view key,
                                 std::string_view path);
absl::StatusOr<const Json*> GetArray(const Json& object, std::string_view key,
                                     std::string_view path);
absl::StatusOr<const Json*> GetObject(const Json& object, std::string_view key,
                                      std::string_view path);
absl::StatusOr<std::vector<std::string>> GetStringArray(const Json& object,
                                                        std::string_view key,
                                                        std::string_view path);

std::string JoinPath(std::string_view path, std::string_view key);
std::string IndexPath(std::string_view path, size_t index);

}  // namespace privsynth

#endif  // PRIVSYNTH_COMMON_JSON_UTIL_H_
