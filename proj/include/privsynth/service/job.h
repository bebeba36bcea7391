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

#ifndef PRIVSYNTH_SERVICE_JOB_H_
#define PRIVSYNTH_SERVICE_JOB_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"

namespace privsynth::service {

// Listed in pipeline order. Failed is reachable from every state but done.
enum class JobState {
  kQueued,
  kSanitizingReceived,
  kFineTuning,
  kGenerating,
  kTraining,
  kEvaluating,
  kDone,
  kFailed,
};

std::string_view JobStateName(JobState state);
absl::StatusOr<JobState> ParseJobState(std::string_view name);
bool IsTerminal(JobState state);
// Forward moves only; skipping stages is allowed, staying put is not.
bool CanTransition(JobState from, JobState to);

enum class ArtifactKind {
  kDataset,
  kPrivacyReport,
  kUtilityReport,
  kModelWeights,
  kTradeoffTable,
};

std::string_view ArtifactKindName(ArtifactKind kind);
absl::StatusOr<ArtifactKind> ParseArtifactKind(std::string_view name);

struct ArtifactRef {
  ArtifactKind kind = ArtifactKind::kDataset;
  // Lowercase hex sha256 of the content.
  std::string address;
  std::string media_type;
  uint64_t size = 0;
  friend bool operator==(const ArtifactRef&, const ArtifactRef&) = default;
};

struct JobError {
  // State the job was in when it failed.
  std::string step;
  std::string kind;
  std::string message;
  friend bool operator==(const JobError&, const JobError&) = default;
};

struct Job {
  std::string id;
  JobState state = JobState::kQueued;
  int64_t created_ms = 0;
  int64_t updated_ms = 0;
  std::optional<JobError> error;
  std::vector<ArtifactRef> artifacts;
  // Pipeline knobs fixed at submission (counts, sizes, seed, training).
  Json options = Json::object();
};

Json ArtifactRefToJson(const ArtifactRef& ref);
absl::StatusOr<ArtifactRef> ArtifactRefFromJson(const Json& doc,
                                                std::string_view path);
// {"id", "state", "created_at", "updated_at", "error", "artifacts",
//  "options"}; timestamps are RFC 3339 UTC.
Json JobToJson(const Job& job);

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_JOB_H_
