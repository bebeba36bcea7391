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

#ifndef PRIVSYNTH_SANITIZER_MANIFEST_H_
#define PRIVSYNTH_SANITIZER_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/sanitizer/request.h"

namespace privsynth::sanitizer {

struct ManifestSegment {
  SegmentRole role;
  imaging::BitMask mask;
  double confidence = 1.0;
};

struct ManifestEntry {
  std::string image_name;
  std::vector<ManifestSegment> segments;

  // Null when the role has no mask.
  const imaging::BitMask* MaskFor(SegmentRole role) const;
};

// Output of an external detector/segmenter, one entry per reference image.
struct SegmentationManifest {
  std::vector<ManifestEntry> entries;

  const ManifestEntry* Find(std::string_view image_name) const;
};

// Brings an entry into canonical form for an image of the given size:
// checks mask dimensions, confidences and target indices, merges repeated
// target masks by union, and replaces any supplied background mask by the
// complement of the union of target masks. Missing targets are left for
// SplitSegments to report.
absl::StatusOr<ManifestEntry> NormalizeEntry(const ManifestEntry& entry,
                                             int width, int height,
                                             const UserRequest& request);

// File form:
//   {"images": [{"file": "img0.png",
//                "segments": [{"role": "t", "mask": "masks/img0_t.png",
//                              "confidence": 0.93}]}]}
// Mask paths are relative to the manifest's directory.
absl::StatusOr<SegmentationManifest> ReadManifest(
    const std::filesystem::path& path);
// Writes masks next to the manifest under masks/.
absl::Status WriteManifest(const SegmentationManifest& manifest,
                           const std::filesystem::path& path,
                           int target_count);

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_MANIFEST_H_
