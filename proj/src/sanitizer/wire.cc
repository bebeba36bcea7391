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

#include "privsynth/sanitizer/wire.h"

#include <set>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/png_io.h"

namespace privsynth::sanitizer {
namespace {

absl::Status Violation(std::string_view path, std::string_view message) {
  return MakeError(ErrorKind::kSchemaViolation,
                   absl::StrCat(ToStd(path), ": ",
                                ToStd(message)));
}

absl::StatusOr<SanitizedSegment> SegmentFromJson(const Json& doc,
                                                 const UserRequest& request,
                                                 int width, int height,
                                                 const std::string& path) {
  SanitizedSegment segment;
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string key, GetString(doc, "role", path));
  auto role = ParseRoleKey(key);
  if (!role.ok() || !ValidateRole(*role, request).ok()) {
    return Violation(JoinPath(path, "role"),
                     absl::StrCat("unknown role '", key, "'"));
  }
  segment.role = *role;
  PRIVSYNTH_ASSIGN_OR_RETURN(segment.text, GetString(doc, "text", path));
  if (segment.text != RoleText(segment.role, request)) {
    return Violation(JoinPath(path, "text"),
                     "text differs from the request description");
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* scheme, GetObject(doc, "scheme", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(segment.scheme,
                             LevelFromJson(*scheme, JoinPath(path, "scheme")));
  const std::string payload_path = JoinPath(path, "payload");
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* payload,
                             GetObject(doc, "payload", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string kind_name,
                             GetString(*payload, "kind", payload_path));
  auto kind = ParsePayloadKind(kind_name);
  if (!kind.ok()) {
    return Violation(JoinPath(payload_path, "kind"),
                     ToStd(kind.status().message()));
  }
  segment.payload_kind = *kind;
  if (segment.payload_kind != ExpectedPayload(segment.scheme.level)) {
    return Violation(JoinPath(payload_path, "kind"),
                     absl::StrCat("payload '", kind_name,
                                  "' does not match scheme ",
                                  FormatLevel(segment.scheme)));
  }
  const bool has_data = payload->contains("png_base64");
  if (segment.payload_kind == PayloadKind::kNone) {
    if (has_data) {
      return Violation(JoinPath(payload_path, "png_base64"),
                       "text-only segment carries image data");
    }
    return segment;
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string data,
                             GetString(*payload, "png_base64", payload_path));
  auto image = imaging::DecodePngBase64(data);
  if (!image.ok()) {
    return Violation(JoinPath(payload_path, "png_base64"),
                     ToStd(image.status().message()));
  }
  if (image->width() != width || image->height() != height) {
    return Violation(JoinPath(payload_path, "png_base64"),
                     absl::StrCat("payload is ", image->width(), "x",
                                  image->height(), ", image is ", width, "x",
                                  height));
  }
  segment.payload = std::move(*image);
  return segment;
}

}  // namespace

absl::StatusOr<Json> BundleToJson(const SanitizedBundle& bundle) {
  const int targets = bundle.request.target_count();
  Json images = Json::array();
  for (const auto& entry : bundle.entries) {
    Json segments = Json::array();
    for (const auto& segment : entry.segments) {
      Json payload = {
          {"kind", std::string(PayloadKindName(segment.payload_kind))}};
      if (segment.payload.has_value()) {
        PRIVSYNTH_ASSIGN_OR_RETURN(payload["png_base64"],
                                   imaging::EncodePngBase64(*segment.payload));
      }
      segments.push_back({{"role", RoleKey(segment.role, targets)},
                          {"text", segment.text},
                          {"scheme", LevelToJson(segment.scheme)},
                          {"payload", std::move(payload)}});
    }
    images.push_back({{"name", entry.image_name},
                      {"width", entry.width},
                      {"height", entry.height},
                      {"segments", std::move(segments)}});
  }
  return Json{{"format", kBundleFormat},
              {"seed", bundle.seed},
              {"request", RequestToJson(bundle.request)},
              {"preference", PreferenceToJson(bundle.preference)},
              {"images", std::move(images)}};
}

absl::StatusOr<SanitizedBundle> BundleFromJson(const Json& doc) {
  if (!doc.is_object()) return Violation("bundle", "expected an object");
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string format, GetString(doc, "format", ""));
  if (format != kBundleFormat) {
    return Violation("format", absl::StrCat("unsupported bundle format '",
                                            format, "'"));
  }
  SanitizedBundle bundle;
  PRIVSYNTH_ASSIGN_OR_RETURN(bundle.seed, GetUint(doc, "seed", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* request, GetObject(doc, "request", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(bundle.request,
                             RequestFromJson(*request, "request"));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* preference,
                             GetObject(doc, "preference", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(bundle.preference,
                             PreferenceFromJson(*preference, "preference"));
  if (absl::Status status = bundle.preference.ValidateFor(bundle.request);
      !status.ok()) {
    return Violation("preference", ToStd(status.message()));
  }
  const auto roles = RolesFor(bundle.request);
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* images, GetArray(doc, "images", ""));
  for (size_t i = 0; i < images->size(); ++i) {
    const Json& image = (*images)[i];
    const std::string path = IndexPath("images", i);
    BundleEntry entry;
    PRIVSYNTH_ASSIGN_OR_RETURN(entry.image_name, GetString(image, "name", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t width, GetInt(image, "width", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t height, GetInt(image, "height", path));
    if (width < 1 || height < 1 || width > (1 << 15) || height > (1 << 15)) {
      return Violation(path, "image dimensions out of range");
    }
    entry.width = static_cast<int>(width);
    entry.height = static_cast<int>(height);
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* segments,
                               GetArray(image, "segments", path));
    std::set<SegmentRole> seen;
    for (size_t j = 0; j < segments->size(); ++j) {
      const std::string segment_path = IndexPath(JoinPath(path, "segments"), j);
      PRIVSYNTH_ASSIGN_OR_RETURN(
          SanitizedSegment segment,
          SegmentFromJson((*segments)[j], bundle.request, entry.width,
                          entry.height, segment_path));
      if (!seen.insert(segment.role).second) {
        return Violation(JoinPath(segment_path, "role"), "duplicate role");
      }
      if (!(segment.scheme == *bundle.preference.Find(segment.role))) {
        return Violation(JoinPath(segment_path, "scheme"),
                         "scheme differs from the preference");
      }
      entry.segments.push_back(std::move(segment));
    }
    if (seen.size() != roles.size()) {
      return Violation(JoinPath(path, "segments"),
                       absl::StrCat("expected one segment per role (",
                                    roles.size(), "), got ", seen.size()));
    }
    bundle.entries.push_back(std::move(entry));
  }
  return bundle;
}

absl::StatusOr<std::string> SerializeBundle(const SanitizedBundle& bundle) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, BundleToJson(bundle));
  return doc.dump();
}

absl::StatusOr<SanitizedBundle> ParseBundle(std::string_view text) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ParseJson(text, "bundle"));
  return BundleFromJson(doc);
}

absl::Status WriteBundleFile(const std::filesystem::path& path,
                             const SanitizedBundle& bundle) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string text, SerializeBundle(bundle));
  return WriteTextFile(path, text + "\n");
}

absl::StatusOr<SanitizedBundle> ReadBundleFile(
    const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string text, ReadTextFile(path));
  return ParseBundle(text);
}

}  // namespace privsynth::sanitizer
