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

#include "privsynth/common/json_util.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth {
namespace {

absl::Status Violation(std::string_view path, std::string_view detail) {
  return MakeError(ErrorKind::kSchemaViolation,
                   absl::StrCat(ToStd(path), ": ",
                                ToStd(detail)));
}

}  // namespace

std::string JoinPath(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return absl::StrCat(ToStd(path), ".",
                      ToStd(key));
}

std::string IndexPath(std::string_view path, size_t index) {
  return absl::StrCat(ToStd(path), "[", index, "]");
}

absl::StatusOr<Json> ParseJson(std::string_view text, std::string_view what) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) return Violation(what, "malformed JSON document");
  return doc;
}

absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot open ", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot write ", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("short write to ", path.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> ReadJsonFile(const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string text, ReadTextFile(path));
  return ParseJson(text, path.filename().string());
}

absl::Status WriteJsonFile(const std::filesystem::path& path, const Json& doc) {
  return WriteTextFile(path, doc.dump(2) + "\n");
}

absl::StatusOr<const Json*> RequireField(const Json& object,
                                         std::string_view key,
                                         std::string_view path) {
  if (!object.is_object()) return Violation(path, "expected an object");
  auto it = object.find(std::string(key));
  if (it == object.end()) {
    return Violation(JoinPath(path, key), "missing field");
  }
  return &*it;
}

absl::StatusOr<std::string> GetString(const Json& object, std::string_view key,
                                      std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_string()) {
    return Violation(JoinPath(path, key), "expected a string");
  }
  return field->get<std::string>();
}

absl::StatusOr<double> GetNumber(const Json& object, std::string_view key,
                                 std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_number()) {
    return Violation(JoinPath(path, key), "expected a number");
  }
  return field->get<double>();
}

absl::StatusOr<int64_t> GetInt(const Json& object, std::string_view key,
                               std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_number_integer()) {
    return Violation(JoinPath(path, key), "expected an integer");
  }
  return field->get<int64_t>();
}

absl::StatusOr<uint64_t> GetUint(const Json& object, std::string_view key,
                                 std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_number_unsigned() &&
      !(field->is_number_integer() && field->get<int64_t>() >= 0)) {
    return Violation(JoinPath(path, key), "expected an unsigned integer");
  }
  return field->get<uint64_t>();
}

absl::StatusOr<const Json*> GetArray(const Json& object, std::string_view key,
                                     std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_array()) {
    return Violation(JoinPath(path, key), "expected an array");
  }
  return field;
}

absl::StatusOr<const Json*> GetObject(const Json& object, std::string_view key,
                                      std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_object()) {
    return Violation(JoinPath(path, key), "expected an object");
  }
  return field;
}

absl::StatusOr<std::vector<std::string>> GetStringArray(const Json& object,
                                                        std::string_view key,
                                                        std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* array, GetArray(object, key, path));
  std::vector<std::string> out;
  const std::string field_path = JoinPath(path, key);
  for (size_t i = 0; i < array->size(); ++i) {
    if (!(*array)[i].is_string()) {
      return Violation(IndexPath(field_path, i), "expected a string");
    }
    out.push_back((*array)[i].get<std::string>());
  }
  return out;
}

}  // namespace privsynth
