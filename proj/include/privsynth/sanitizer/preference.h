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

#ifndef PRIVSYNTH_SANITIZER_PREFERENCE_H_
#define PRIVSYNTH_SANITIZER_PREFERENCE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/imaging/noise.h"
#include "privsynth/sanitizer/request.h"

namespace privsynth::sanitizer {

enum class Level { kL0 = 0, kL1 = 1, kL2 = 2 };
enum class FeatureKind { kCanny, kPose, kLayoutBox };

std::string_view FeatureKindName(FeatureKind kind);
absl::StatusOr<FeatureKind> ParseFeatureKind(std::string_view name);

// L0 shares text only, L1 text plus a derived feature image, L2 text plus the
// raw segment. An optional noise modifier perturbs the segment before the
// feature or raw export.
struct SanitizationLevel {
  Level level = Level::kL0;
  std::optional<FeatureKind> feature;
  std::optional<imaging::NoiseParams> noise;

  static SanitizationLevel L0() { return {Level::kL0, std::nullopt, {}}; }
  static SanitizationLevel L1(FeatureKind kind = FeatureKind::kCanny) {
    return {Level::kL1, kind, {}};
  }
  static SanitizationLevel L2() { return {Level::kL2, std::nullopt, {}}; }

  absl::Status Validate() const;
  friend bool operator==(const SanitizationLevel&,
                         const SanitizationLevel&) = default;
};

// "L0", "L1:canny", "L1:pose", "L2", with an optional "@sigma" noise
// modifier, e.g. "L2@10". A bare "L1" means canny.
std::string FormatLevel(const SanitizationLevel& level);
absl::StatusOr<SanitizationLevel> ParseLevel(std::string_view text);

Json LevelToJson(const SanitizationLevel& level);
absl::StatusOr<SanitizationLevel> LevelFromJson(const Json& doc,
                                                std::string_view path);

// Per-role sanitization levels; total over the roles of a request.
struct PrivacyPreference {
  std::map<SegmentRole, SanitizationLevel> levels;

  absl::Status ValidateFor(const UserRequest& request) const;
  const SanitizationLevel* Find(SegmentRole role) const;
  int target_count() const;

  // "t=L2,b=L0" / "t1=L0,t2=L1:canny,b=L2".
  std::string Format() const;
  static absl::StatusOr<PrivacyPreference> Parse(std::string_view text);

  friend bool operator==(const PrivacyPreference&,
                         const PrivacyPreference&) = default;
};

// Several preferences in one string. Preferences are separated by ';' or,
// in the flat comma form "t=L0,b=L0,t=L2,b=L0", a new preference starts
// whenever a role repeats.
absl::StatusOr<std::vector<PrivacyPreference>> ParsePreferenceList(
    std::string_view text);

Json PreferenceToJson(const PrivacyPreference& preference);
absl::StatusOr<PrivacyPreference> PreferenceFromJson(const Json& doc,
                                                     std::string_view path);

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_PREFERENCE_H_
