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

#ifndef PRIVSYNTH_COMMON_STATUS_H_
#define PRIVSYNTH_COMMON_STATUS_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privsynth {

// Domain error kinds. Each maps onto a canonical absl::StatusCode and is
// attached to the status as a payload so callers can branch on it.
enum class ErrorKind {
  kInvalidArgument,
  kSchemaViolation,
  kIncompleteSegmentation,
  kDegenerateReference,
  kBackendUnavailable,
  kUnsupportedFeature,
  kIncompatibleEmbeddings,
  kInconsistentBundle,
  kPlacementInfeasible,
  kGenerationFailed,
  kIncompatibleDatasets,
  kUnsplittableClass,
  kUndefinedMetric,
  kTrainingFailed,
  kNotFound,
  kPayloadTooLarge,
  kConflict,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);
absl::StatusCode ErrorKindCode(ErrorKind kind);
// Inverse of ErrorKindName.
std::optional<ErrorKind> ParseErrorKind(std::string_view name);

absl::Status MakeError(ErrorKind kind, std::string_view message);

// Returns the attached kind, or nullopt for OK / foreign statuses.
std::optional<ErrorKind> ErrorKindOf(const absl::Status& status);

// Prefixes the message while keeping code and kind.
absl::Status Annotate(const absl::Status& status, std::string_view context);

// One-line machine-parsable rendering: {"error":{"code":..,"kind":..,...}}.
std::string StatusToJsonLine(const absl::Status& status);

inline std::string ToStd(absl::string_view s) {
  return std::string(s.data(), s.size());
}
inline std::string ToStd(std::string_view s) { return std::string(s); }
inline std::string ToStd(const char* s) { return std::string(s); }
inline std::string ToStd(const std::string& s) { return s; }

}  // namespace privsynth

#define PRIVSYNTH_STATUS_CONCAT_INNER_(a, b) a##b
#define PRIVSYNTH_STATUS_CONCAT_(a, b) PRIVSYNTH_STATUS_CONCAT_INNER_(a, b)

#define PRIVSYNTH_RETURN_IF_ERROR(expr)        \
  do {                                         \
    ::absl::Status _privsynth_status = (expr); \
    if (!_privsynth_status.ok()) {             \
      return _privsynth_status;                \
    }                                          \
  } while (0)

#define PRIVSYNTH_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                     \
  if (!tmp.ok()) {                                       \
    return tmp.status();                                 \
  }                                                      \
  lhs = std::move(*tmp)

#define PRIVSYNTH_ASSIGN_OR_RETURN(lhs, expr) \
  PRIVSYNTH_ASSIGN_OR_RETURN_IMPL_(           \
      PRIVSYNTH_STATUS_CONCAT_(_privsynth_statusor_, __LINE__), lhs, expr)

#endif  // PRIVSYNTH_COMMON_STATUS_H_
