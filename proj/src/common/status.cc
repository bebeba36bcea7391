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

#include "privsynth/common/status.h"

#include <array>
#include <utility>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace privsynth {
namespace {

constexpr char kKindPayloadUrl[] = "type.privsynth/error-kind";

struct KindInfo {
  ErrorKind kind;
  std::string_view name;
  absl::StatusCode code;
};

constexpr std::array<KindInfo, 18> kKinds = {{
    {ErrorKind::kInvalidArgument, "invalid-argument",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kSchemaViolation, "schema-violation",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kIncompleteSegmentation, "incomplete-segmentation",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kDegenerateReference, "degenerate-reference",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kBackendUnavailable, "backend-unavailable",
     absl::StatusCode::kUnavailable},
    {ErrorKind::kUnsupportedFeature, "unsupported-feature",
     absl::StatusCode::kUnimplemented},
    {ErrorKind::kIncompatibleEmbeddings, "incompatible-embeddings",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kInconsistentBundle, "inconsistent-bundle",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kPlacementInfeasible, "placement-infeasible",
     absl::StatusCode::kOutOfRange},
    {ErrorKind::kGenerationFailed, "generation-failed",
     absl::StatusCode::kAborted},
    {ErrorKind::kIncompatibleDatasets, "incompatible-datasets",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kUnsplittableClass, "unsplittable-class",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kUndefinedMetric, "undefined-metric",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kTrainingFailed, "training-failed",
     absl::StatusCode::kAborted},
    {ErrorKind::kNotFound, "not-found", absl::StatusCode::kNotFound},
    {ErrorKind::kPayloadTooLarge, "payload-too-large",
     absl::StatusCode::kResourceExhausted},
    {ErrorKind::kConflict, "conflict", absl::StatusCode::kAlreadyExists},
    {ErrorKind::kIo, "io", absl::StatusCode::kInternal},
}};

const KindInfo& Info(ErrorKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) return info;
  }
  return kKinds[0];
}

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) { return Info(kind).name; }

absl::StatusCode ErrorKindCode(ErrorKind kind) { return Info(kind).code; }

std::optional<ErrorKind> ParseErrorKind(std::string_view name) {
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

absl::Status MakeError(ErrorKind kind, std::string_view message) {
  const KindInfo& info = Info(kind);
  absl::Status status(info.code, std::string(message));
  status.SetPayload(kKindPayloadUrl, absl::Cord(std::string(info.name)));
  return status;
}

std::optional<ErrorKind> ErrorKindOf(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  auto payload = status.GetPayload(kKindPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  return ParseErrorKind(std::string(*payload));
}

absl::Status Annotate(const absl::Status& status, std::string_view context) {
  if (status.ok()) return status;
  absl::Status annotated(
      status.code(),
      absl::StrCat(ToStd(absl::string_view(context.data(), context.size())),
                   ": ", ToStd(status.message())));
  status.ForEachPayload(
      [&annotated](absl::string_view url, const absl::Cord& value) {
        annotated.SetPayload(url, value);
      });
  return annotated;
}

std::string StatusToJsonLine(const absl::Status& status) {
  nlohmann::json error = {
      {"code", ToStd(absl::StatusCodeToString(status.code()))},
      {"message", ToStd(status.message())},
  };
  if (auto kind = ErrorKindOf(status)) {
    error["kind"] = std::string(ErrorKindName(*kind));
  }
  return nlohmann::json{{"error", error}}.dump();
}

}  // namespace privsynth
