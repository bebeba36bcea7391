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

#include "privsynth/service/job.h"

#include <array>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/time/time.h"
#include "privsynth/common/status.h"

namespace privsynth::service {
namespace {

constexpr std::array<std::pair<JobState, std::string_view>, 8> kStates = {{
    {JobState::kQueued, "queued"},
    {JobState::kSanitizingReceived, "sanitizing-received"},
    {JobState::kFineTuning, "fine_tuning"},
    {JobState::kGenerating, "generating"},
    {JobState::kTraining, "training"},
    {JobState::kEvaluating, "evaluating"},
    {JobState::kDone, "done"},
    {JobState::kFailed, "failed"},
}};

constexpr std::array<std::pair<ArtifactKind, std::string_view>, 5> kKinds = {{
    {ArtifactKind::kDataset, "dataset"},
    {ArtifactKind::kPrivacyReport, "privacy_report"},
    {ArtifactKind::kUtilityReport, "utility_report"},
    {ArtifactKind::kModelWeights, "model_weights"},
    {ArtifactKind::kTradeoffTable, "tradeoff_table"},
}};

std::string FormatMillis(int64_t ms) {
  return ToStd(absl::FormatTime("%Y-%m-%dT%H:%M:%E3SZ",
                                absl::FromUnixMillis(ms), absl::UTCTimeZone()));
}

}  // namespace

std::string_view JobStateName(JobState state) {
  for (const auto& [s, name] : kStates) {
    if (s == state) return name;
  }
  return "queued";
}

absl::StatusOr<JobState> ParseJobState(std::string_view name) {
  for (const auto& [s, n] : kStates) {
    if (n == name) return s;
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown job state '", ToStd(name), "'"));
}

bool IsTerminal(JobState state) {
  return state == JobState::kDone || state == JobState::kFailed;
}

bool CanTransition(JobState from, JobState to) {
  if (IsTerminal(from)) return false;
  if (to == JobState::kFailed) return true;
  return static_cast<int>(to) > static_cast<int>(from);
}

std::string_view ArtifactKindName(ArtifactKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "dataset";
}

absl::StatusOr<ArtifactKind> ParseArtifactKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown artifact kind '", ToStd(name), "'"));
}

Json ArtifactRefToJson(const ArtifactRef& ref) {
  return {{"kind", std::string(ArtifactKindName(ref.kind))},
          {"address", ref.address},
          {"media_type", ref.media_type},
          {"size", ref.size}};
}

absl::StatusOr<ArtifactRef> ArtifactRefFromJson(const Json& doc,
                                                std::string_view path) {
  ArtifactRef ref;
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string kind, GetString(doc, "kind", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(ref.kind, ParseArtifactKind(kind));
  PRIVSYNTH_ASSIGN_OR_RETURN(ref.address, GetString(doc, "address", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(ref.media_type,
                             GetString(doc, "media_type", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(ref.size, GetUint(doc, "size", path));
  return ref;
}

Json JobToJson(const Job& job) {
  Json artifacts = Json::array();
  for (const ArtifactRef& ref : job.artifacts) {
    artifacts.push_back(ArtifactRefToJson(ref));
  }
  Json error = nullptr;
  if (job.error.has_value()) {
    error = {{"step", job.error->step},
             {"kind", job.error->kind},
             {"message", job.error->message}};
  }
  return {{"id", job.id},
          {"state", std::string(JobStateName(job.state))},
          {"created_at", FormatMillis(job.created_ms)},
          {"updated_at", FormatMillis(job.updated_ms)},
          {"error", error},
          {"artifacts", artifacts},
          {"options", job.options}};
}

}  // namespace privsynth::service
