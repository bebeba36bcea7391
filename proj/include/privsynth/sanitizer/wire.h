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

#ifndef PRIVSYNTH_SANITIZER_WIRE_H_
#define PRIVSYNTH_SANITIZER_WIRE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::sanitizer {

inline constexpr char kBundleFormat[] = "privsynth.bundle/v1";

// Envelope:
//   {"format": "privsynth.bundle/v1", "seed": 7,
//    "request": {...}, "preference": {"t": {"level": "L2"}, ...},
//    "images": [{"name", "width", "height",
//                "segments": [{"role", "text", "scheme",
//                              "payload": {"kind", "png_base64"?}}]}]}
absl::StatusOr<Json> BundleToJson(const SanitizedBundle& bundle);
// Checks the envelope structurally and against the bundle invariants (one
// segment per role, payload kind matching the scheme, verbatim text). Errors
// name the offending field, e.g. "images[3].segments[0].payload.png_base64".
absl::StatusOr<SanitizedBundle> BundleFromJson(const Json& doc);

// Canonical text form (sorted keys, no insignificant whitespace). This is
// the device-to-server request body.
absl::StatusOr<std::string> SerializeBundle(const SanitizedBundle& bundle);
absl::StatusOr<SanitizedBundle> ParseBundle(std::string_view text);

absl::Status WriteBundleFile(const std::filesystem::path& path,
                             const SanitizedBundle& bundle);
absl::StatusOr<SanitizedBundle> ReadBundleFile(
    const std::filesystem::path& path);

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_WIRE_H_
