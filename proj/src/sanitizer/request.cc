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

#include "privsynth/sanitizer/request.h"

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::sanitizer {

std::string_view TaskKindName(TaskKind kind) {
  return kind == TaskKind::kClassification ? "classification" : "detection";
}

absl::StatusOr<TaskKind> ParseTaskKind(std::string_view name) {
  if (name == "classification") return TaskKind::kClassification;
  if (name == "detection") return TaskKind::kDetection;
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown task kind '",
                                ToStd(name), "'"));
}

absl::Status ValidateRequest(const UserRequest& request) {
  if (request.target_objects.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "request needs at least one target object");
  }
  for (size_t i = 0; i < request.target_objects.size(); ++i) {
    if (request.target_objects[i].empty()) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("target_objects[", i, "] is empty"));
    }
  }
  if (request.background.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "background description is empty");
  }
  if (request.task_kind == TaskKind::kClassification &&
      request.label_classes.size() < 2) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "classification needs at least two label classes");
  }
  for (size_t i = 0; i < request.label_classes.size(); ++i) {
    if (request.label_classes[i].empty()) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("label_classes[", i, "] is empty"));
    }
  }
  return absl::OkStatus();
}

Json RequestToJson(const UserRequest& request) {
  return Json{
      {"target_objects", request.target_objects},
      {"background", request.background},
      {"training_objective", request.training_objective},
      {"label_classes", request.label_classes},
      {"task", std::string(TaskKindName(request.task_kind))},
      {"prompt_template", request.prompt_template},
  };
}

absl::StatusOr<UserRequest> RequestFromJson(const Json& doc,
                                            std::string_view path) {
  UserRequest request;
  PRIVSYNTH_ASSIGN_OR_RETURN(request.target_objects,
                             GetStringArray(doc, "target_objects", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(request.background,
                             GetString(doc, "background", path));
  if (doc.contains("training_objective")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(request.training_objective,
                               GetString(doc, "training_objective", path));
  }
  if (doc.contains("label_classes")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(request.label_classes,
                               GetStringArray(doc, "label_classes", path));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string task, GetString(doc, "task", path));
  auto kind = ParseTaskKind(task);
  if (!kind.ok()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(JoinPath(path, "task"), ": ",
                                  ToStd(kind.status().message())));
  }
  request.task_kind = *kind;
  if (doc.contains("prompt_template")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(request.prompt_template,
                               GetString(doc, "prompt_template", path));
  }
  absl::Status valid = ValidateRequest(request);
  if (!valid.ok()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(ToStd(path), ": ",
                                  ToStd(valid.message())));
  }
  return request;
}

std::string RoleKey(SegmentRole role, int target_count) {
  if (!role.is_target()) return "b";
  if (target_count <= 1 && role.target_index == 0) return "t";
  return absl::StrCat("t", role.target_index + 1);
}

absl::StatusOr<SegmentRole> ParseRoleKey(std::string_view key) {
  if (key == "b") return SegmentRole::Background();
  if (key == "t") return SegmentRole::Target(0);
  int index = 0;
  if (key.size() > 1 && key[0] == 't' &&
      absl::SimpleAtoi(absl::string_view(key.data() + 1, key.size() - 1),
                       &index) &&
      index >= 1) {
    return SegmentRole::Target(index - 1);
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown segment role '",
                                ToStd(key),
                                "' (expected t, t1, t2, ... or b)"));
}

std::vector<SegmentRole> RolesFor(const UserRequest& request) {
  std::vector<SegmentRole> roles;
  for (int i = 0; i < request.target_count(); ++i) {
    roles.push_back(SegmentRole::Target(i));
  }
  roles.push_back(SegmentRole::Background());
  return roles;
}

absl::Status ValidateRole(SegmentRole role, const UserRequest& request) {
  if (role.is_target() &&
      (role.target_index < 0 || role.target_index >= request.target_count())) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("target index ", role.target_index,
                                  " out of range for ", request.target_count(),
                                  " target(s)"));
  }
  return absl::OkStatus();
}

std::string RoleText(SegmentRole role, const UserRequest& request) {
  if (!role.is_target()) return request.background;
  return request.target_objects[static_cast<size_t>(role.target_index)];
}

}  // namespace privsynth::sanitizer
