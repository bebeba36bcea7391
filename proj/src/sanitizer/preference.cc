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

#include "privsynth/sanitizer/preference.h"

#include <set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "privsynth/common/status.h"

namespace privsynth::sanitizer {
namespace {

std::string Quote(std::string_view text) {
  return absl::StrCat("'", ToStd(text), "'");
}

// Role keys of a preference are written relative to its own target count.
int TargetCountOf(const std::map<SegmentRole, SanitizationLevel>& levels) {
  int count = 0;
  for (const auto& [role, level] : levels) {
    if (role.is_target()) count = std::max(count, role.target_index + 1);
  }
  return count;
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kCanny:
      return "canny";
    case FeatureKind::kPose:
      return "pose";
    case FeatureKind::kLayoutBox:
      return "layout_box";
  }
  return "canny";
}

absl::StatusOr<FeatureKind> ParseFeatureKind(std::string_view name) {
  if (name == "canny") return FeatureKind::kCanny;
  if (name == "pose") return FeatureKind::kPose;
  if (name == "layout_box") return FeatureKind::kLayoutBox;
  return MakeError(ErrorKind::kUnsupportedFeature,
                   absl::StrCat("unsupported feature kind ", Quote(name)));
}

absl::Status SanitizationLevel::Validate() const {
  if ((level == Level::kL1) != feature.has_value()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "a feature kind is required for L1 and only for L1");
  }
  if (noise.has_value()) {
    if (level == Level::kL0) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "noise modifier needs an image payload (L1 or L2)");
    }
    if (!(noise->sigma >= 0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("noise sigma must be >= 0, got ",
                                    noise->sigma));
    }
  }
  return absl::OkStatus();
}

std::string FormatLevel(const SanitizationLevel& level) {
  std::string out = absl::StrCat("L", static_cast<int>(level.level));
  if (level.feature.has_value()) {
    absl::StrAppend(&out, ":", ToStd(FeatureKindName(*level.feature)));
  }
  if (level.noise.has_value()) absl::StrAppend(&out, "@", level.noise->sigma);
  return out;
}

absl::StatusOr<SanitizationLevel> ParseLevel(std::string_view text) {
  absl::string_view rest(text.data(), text.size());
  std::optional<imaging::NoiseParams> noise;
  if (auto at = rest.find('@'); at != absl::string_view::npos) {
    double sigma = 0;
    if (!absl::SimpleAtod(rest.substr(at + 1), &sigma)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("bad noise sigma in level ", Quote(text)));
    }
    noise = imaging::NoiseParams{sigma, 0};
    rest = rest.substr(0, at);
  }
  std::string_view feature_name;
  if (auto colon = rest.find(':'); colon != absl::string_view::npos) {
    feature_name = std::string_view(rest.data() + colon + 1,
                                    rest.size() - colon - 1);
    rest = rest.substr(0, colon);
  }
  SanitizationLevel level;
  if (rest == "L0") {
    level = SanitizationLevel::L0();
  } else if (rest == "L1") {
    level = SanitizationLevel::L1();
  } else if (rest == "L2") {
    level = SanitizationLevel::L2();
  } else {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("unknown sanitization level ", Quote(text)));
  }
  if (!feature_name.empty()) {
    if (level.level != Level::kL1) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("feature kind only applies to L1 in ",
                                    Quote(text)));
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(level.feature, ParseFeatureKind(feature_name));
  }
  level.noise = noise;
  PRIVSYNTH_RETURN_IF_ERROR(level.Validate());
  return level;
}

Json LevelToJson(const SanitizationLevel& level) {
  Json doc = {{"level", absl::StrCat("L", static_cast<int>(level.level))}};
  if (level.feature.has_value()) {
    doc["feature"] = std::string(FeatureKindName(*level.feature));
  }
  if (level.noise.has_value()) {
    doc["noise"] = {{"sigma", level.noise->sigma}, {"seed", level.noise->seed}};
  }
  return doc;
}

absl::StatusOr<SanitizationLevel> LevelFromJson(const Json& doc,
                                                std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string name, GetString(doc, "level", path));
  SanitizationLevel level;
  if (name == "L0") {
    level.level = Level::kL0;
  } else if (name == "L1") {
    level.level = Level::kL1;
  } else if (name == "L2") {
    level.level = Level::kL2;
  } else {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(JoinPath(path, "level"), ": unknown level ",
                                  Quote(name)));
  }
  if (doc.contains("feature")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string feature,
                               GetString(doc, "feature", path));
    auto kind = ParseFeatureKind(feature);
    if (!kind.ok()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(JoinPath(path, "feature"), ": ",
                                    ToStd(kind.status().message())));
    }
    level.feature = *kind;
  }
  if (doc.contains("noise")) {
    const std::string noise_path = JoinPath(path, "noise");
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* noise, GetObject(doc, "noise", path));
    imaging::NoiseParams params;
    PRIVSYNTH_ASSIGN_OR_RETURN(params.sigma,
                               GetNumber(*noise, "sigma", noise_path));
    PRIVSYNTH_ASSIGN_OR_RETURN(params.seed, GetUint(*noise, "seed", noise_path));
    level.noise = params;
  }
  absl::Status valid = level.Validate();
  if (!valid.ok()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(ToStd(path), ": ",
                                  ToStd(valid.message())));
  }
  return level;
}

absl::Status PrivacyPreference::ValidateFor(const UserRequest& request) const {
  for (const auto& [role, level] : levels) {
    PRIVSYNTH_RETURN_IF_ERROR(ValidateRole(role, request));
    PRIVSYNTH_RETURN_IF_ERROR(level.Validate());
  }
  for (SegmentRole role : RolesFor(request)) {
    if (!levels.contains(role)) {
      return MakeError(
          ErrorKind::kInvalidArgument,
          absl::StrCat("privacy preference has no level for role ",
                       RoleKey(role, request.target_count())));
    }
  }
  return absl::OkStatus();
}

const SanitizationLevel* PrivacyPreference::Find(SegmentRole role) const {
  auto it = levels.find(role);
  return it == levels.end() ? nullptr : &it->second;
}

int PrivacyPreference::target_count() const { return TargetCountOf(levels); }

std::string PrivacyPreference::Format() const {
  const int targets = target_count();
  std::vector<std::string> parts;
  for (const auto& [role, level] : levels) {
    parts.push_back(absl::StrCat(RoleKey(role, targets), "=", FormatLevel(level)));
  }
  return absl::StrJoin(parts, ",");
}

absl::StatusOr<PrivacyPreference> PrivacyPreference::Parse(
    std::string_view text) {
  PrivacyPreference preference;
  for (absl::string_view part :
       absl::StrSplit(absl::string_view(text.data(), text.size()), ',',
                      absl::SkipWhitespace())) {
    part = absl::StripAsciiWhitespace(part);
    const auto eq = part.find('=');
    if (eq == absl::string_view::npos) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("expected role=level, got '",
                                    ToStd(part), "'"));
    }
    const absl::string_view key = absl::StripAsciiWhitespace(part.substr(0, eq));
    const absl::string_view value =
        absl::StripAsciiWhitespace(part.substr(eq + 1));
    PRIVSYNTH_ASSIGN_OR_RETURN(SegmentRole role,
                               ParseRoleKey({key.data(), key.size()}));
    PRIVSYNTH_ASSIGN_OR_RETURN(SanitizationLevel level,
                               ParseLevel({value.data(), value.size()}));
    if (!preference.levels.emplace(role, level).second) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("role '", ToStd(key),
                                    "' appears twice in preference"));
    }
  }
  if (preference.levels.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "empty privacy preference");
  }
  return preference;
}

absl::StatusOr<std::vector<PrivacyPreference>> ParsePreferenceList(
    std::string_view text) {
  std::vector<PrivacyPreference> out;
  for (absl::string_view group :
       absl::StrSplit(absl::string_view(text.data(), text.size()), ';',
                      absl::SkipWhitespace())) {
    std::vector<std::string> current;
    std::set<std::string> seen;
    auto flush = [&]() -> absl::Status {
      if (current.empty()) return absl::OkStatus();
      PRIVSYNTH_ASSIGN_OR_RETURN(
          PrivacyPreference preference,
          PrivacyPreference::Parse(absl::StrJoin(current, ",")));
      out.push_back(std::move(preference));
      current.clear();
      seen.clear();
      return absl::OkStatus();
    };
    for (absl::string_view part :
         absl::StrSplit(group, ',', absl::SkipWhitespace())) {
      part = absl::StripAsciiWhitespace(part);
      std::string key(absl::StripAsciiWhitespace(part.substr(0, part.find('='))));
      if (key == "t") key = "t1";
      if (seen.contains(key)) PRIVSYNTH_RETURN_IF_ERROR(flush());
      seen.insert(key);
      current.emplace_back(part);
    }
    PRIVSYNTH_RETURN_IF_ERROR(flush());
  }
  if (out.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "no privacy preferences given");
  }
  return out;
}

Json PreferenceToJson(const PrivacyPreference& preference) {
  Json doc = Json::object();
  const int targets = preference.target_count();
  for (const auto& [role, level] : preference.levels) {
    doc[RoleKey(role, targets)] = LevelToJson(level);
  }
  return doc;
}

absl::StatusOr<PrivacyPreference> PreferenceFromJson(const Json& doc,
                                                     std::string_view path) {
  if (!doc.is_object() || doc.empty()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(ToStd(path),
                                  ": expected a non-empty object"));
  }
  PrivacyPreference preference;
  for (const auto& [key, value] : doc.items()) {
    auto role = ParseRoleKey(key);
    if (!role.ok()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(JoinPath(path, key), ": ",
                                    ToStd(role.status().message())));
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(SanitizationLevel level,
                               LevelFromJson(value, JoinPath(path, key)));
    if (!preference.levels.emplace(*role, level).second) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(JoinPath(path, key), ": duplicate role"));
    }
  }
  return preference;
}

}  // namespace privsynth::sanitizer
