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

#include "privsynth/sanitizer/manifest.h"

#include <map>

#include "absl/strings/str_cat.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/png_io.h"

namespace privsynth::sanitizer {

namespace fs = std::filesystem;

const imaging::BitMask* ManifestEntry::MaskFor(SegmentRole role) const {
  for (const auto& segment : segments) {
    if (segment.role == role) return &segment.mask;
  }
  return nullptr;
}

const ManifestEntry* SegmentationManifest::Find(
    std::string_view image_name) const {
  for (const auto& entry : entries) {
    if (entry.image_name == image_name) return &entry;
  }
  return nullptr;
}

absl::StatusOr<ManifestEntry> NormalizeEntry(const ManifestEntry& entry,
                                             int width, int height,
                                             const UserRequest& request) {
  std::map<SegmentRole, ManifestSegment> targets;
  for (size_t i = 0; i < entry.segments.size(); ++i) {
    const ManifestSegment& segment = entry.segments[i];
    const std::string where =
        absl::StrCat(entry.image_name, " segment ", i);
    if (segment.mask.width() != width || segment.mask.height() != height) {
      return MakeError(
          ErrorKind::kInvalidArgument,
          absl::StrCat(where, ": mask is ", segment.mask.width(), "x",
                       segment.mask.height(), ", image is ", width, "x",
                       height));
    }
    if (!(segment.confidence >= 0.0 && segment.confidence <= 1.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat(where, ": confidence ", segment.confidence,
                                    " outside [0, 1]"));
    }
    if (!segment.role.is_target()) continue;
    PRIVSYNTH_RETURN_IF_ERROR(
        Annotate(ValidateRole(segment.role, request), where));
    auto [it, inserted] = targets.emplace(segment.role, segment);
    if (!inserted) {
      PRIVSYNTH_ASSIGN_OR_RETURN(it->second.mask,
                                 it->second.mask.Union(segment.mask));
      it->second.confidence =
          std::min(it->second.confidence, segment.confidence);
    }
  }
  ManifestEntry out{entry.image_name, {}};
  imaging::BitMask covered(width, height, false);
  for (auto& [role, segment] : targets) {
    PRIVSYNTH_ASSIGN_OR_RETURN(covered, covered.Union(segment.mask));
    out.segments.push_back(std::move(segment));
  }
  out.segments.push_back(
      {SegmentRole::Background(), covered.Complement(), 1.0});
  return out;
}

absl::StatusOr<SegmentationManifest> ReadManifest(const fs::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(path));
  const fs::path base = path.parent_path();
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* images, GetArray(doc, "images", ""));
  SegmentationManifest manifest;
  for (size_t i = 0; i < images->size(); ++i) {
    const Json& image = (*images)[i];
    const std::string image_path = IndexPath("images", i);
    ManifestEntry entry;
    PRIVSYNTH_ASSIGN_OR_RETURN(entry.image_name,
                               GetString(image, "file", image_path));
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* segments,
                               GetArray(image, "segments", image_path));
    for (size_t j = 0; j < segments->size(); ++j) {
      const Json& record = (*segments)[j];
      const std::string segment_path =
          IndexPath(JoinPath(image_path, "segments"), j);
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string role_key,
                                 GetString(record, "role", segment_path));
      auto role = ParseRoleKey(role_key);
      if (!role.ok()) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(JoinPath(segment_path, "role"), ": ",
                                      ToStd(role.status().message())));
      }
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string mask_file,
                                 GetString(record, "mask", segment_path));
      double confidence = 1.0;
      if (record.contains("confidence")) {
        PRIVSYNTH_ASSIGN_OR_RETURN(
            confidence, GetNumber(record, "confidence", segment_path));
      }
      auto mask = imaging::ReadMaskPng(base / mask_file);
      if (!mask.ok()) {
        return Annotate(mask.status(), JoinPath(segment_path, "mask"));
      }
      entry.segments.push_back({*role, std::move(*mask), confidence});
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

absl::Status WriteManifest(const SegmentationManifest& manifest,
                           const fs::path& path, int target_count) {
  const fs::path base = path.parent_path();
  std::error_code ec;
  fs::create_directories(base / "masks", ec);
  if (ec) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot create ",
                                                  (base / "masks").string(),
                                                  ": ", ec.message()));
  }
  Json images = Json::array();
  for (const auto& entry : manifest.entries) {
    Json segments = Json::array();
    const std::string stem = fs::path(entry.image_name).stem().string();
    for (const auto& segment : entry.segments) {
      const std::string key = RoleKey(segment.role, target_count);
      const std::string mask_file =
          absl::StrCat("masks/", stem, "_", key, ".png");
      PRIVSYNTH_RETURN_IF_ERROR(
          imaging::WriteMaskPng(base / mask_file, segment.mask));
      segments.push_back({{"role", key},
                          {"mask", mask_file},
                          {"confidence", segment.confidence}});
    }
    images.push_back({{"file", entry.image_name}, {"segments", segments}});
  }
  return WriteJsonFile(path, Json{{"images", images}});
}

}  // namespace privsynth::sanitizer
