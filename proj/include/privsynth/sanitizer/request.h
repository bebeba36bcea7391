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

#ifndef PRIVSYNTH_SANITIZER_REQUEST_H_
#define PRIVSYNTH_SANITIZER_REQUEST_H_

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"

namespace privsynth::sanitizer {

enum class TaskKind { kClassification, kDetection };

std::string_view TaskKindName(TaskKind kind);
absl::StatusOr<TaskKind> ParseTaskKind(std::string_view name);

// The user's training request: what to generate and how to label it.
struct UserRequest {
  std::vector<std::string> target_objects;
  std::string background;
  std::string training_objective;
  std::vector<std::string> label_classes;
  TaskKind task_kind = TaskKind::kClassification;
  // Target prompt template; {target} and {class} are substituted.
  std::string prompt_template = "a {target} is {class}";

  int target_count() const { return static_cast<int>(target_objects.size()); }
  friend bool operator==(const UserRequest&, const UserRequest&) = default;
};

absl::Status ValidateRequest(const UserRequest& request);

Json RequestToJson(const UserRequest& request);
absl::StatusOr<UserRequest> RequestFromJson(const Json& doc,
                                            std::string_view path = "request");

// A segment role: one of the request's targets, or the background.
struct SegmentRole {
  enum class Kind { kTarget = 0, kBackground = 1 };

  Kind kind = Kind::kBackground;
  int target_index = 0;

  static SegmentRole Target(int index) { return {Kind::kTarget, index}; }
  static SegmentRole Background() { return {Kind::kBackground, 0}; }
  bool is_target() const { return kind == Kind::kTarget; }

  // Targets sort before the background, in index order.
  friend auto operator<=>(const SegmentRole&, const SegmentRole&) = default;
};

// "t" for the only target of a single-target request, "t1", "t2", ... when
// there are several, "b" for the background.
std::string RoleKey(SegmentRole role, int target_count);
// Accepts "t" (first target), "tN" (1-based) and "b".
absl::StatusOr<SegmentRole> ParseRoleKey(std::string_view key);

// All roles of a request: targets in order, then background.
std::vector<SegmentRole> RolesFor(const UserRequest& request);
absl::Status ValidateRole(SegmentRole role, const UserRequest& request);

// The role's text description, taken verbatim from the request.
std::string RoleText(SegmentRole role, const UserRequest& request);

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_REQUEST_H_
