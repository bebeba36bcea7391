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

#ifndef PRIVSYNTH_SANITIZER_SANITIZE_H_
#define PRIVSYNTH_SANITIZER_SANITIZE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/canny.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/preference.h"
#include "privsynth/sanitizer/request.h"
#include "privsynth/sanitizer/services.h"

namespace privsynth::sanitizer {

// One role's full-resolution canvas: source pixels inside the mask, zero
// elsewhere.
struct Segment {
  SegmentRole role;
  imaging::RasterImage canvas;
  imaging::BitMask mask;
};

// Splits an image into one canvas per role (targets in order, then the
// background). The entry is normalized first, so the background is always
// the complement of the target union.
absl::StatusOr<std::vector<Segment>> SplitSegments(
    const imaging::RasterImage& image, const ManifestEntry& entry,
    const UserRequest& request);

enum class PayloadKind { kNone, kFeatureImage, kRawSegment };

std::string_view PayloadKindName(PayloadKind kind);
absl::StatusOr<PayloadKind> ParsePayloadKind(std::string_view name);
// The payload kind a level must produce.
PayloadKind ExpectedPayload(Level level);

struct SanitizedSegment {
  SegmentRole role;
  std::string text;
  SanitizationLevel scheme;
  PayloadKind payload_kind = PayloadKind::kNone;
  std::optional<imaging::RasterImage> payload;

  friend bool operator==(const SanitizedSegment&,
                         const SanitizedSegment&) = default;
};

enum class NoiseOrder { kBeforeFeature, kAfterFeature };

struct SanitizeOptions {
  uint64_t seed = 0;
  // Only matters for L1 with a noise modifier.
  NoiseOrder noise_order = NoiseOrder::kBeforeFeature;
  imaging::CannyOptions canny;
  // Needed for L1 pose / layout_box. Not owned.
  FeatureService* feature_service = nullptr;
  int parallelism = 1;
};

// Per-image, per-role noise seed. Independent of processing order.
uint64_t NoiseSeed(const SanitizeOptions& options, const imaging::NoiseParams& noise,
                   size_t image_index, SegmentRole role, int target_count);

absl::StatusOr<SanitizedSegment> SanitizeSegment(
    const Segment& segment, const SanitizationLevel& level,
    const UserRequest& request, const SanitizeOptions& options,
    size_t image_index = 0);

struct BundleEntry {
  std::string image_name;
  int width = 0;
  int height = 0;
  std::vector<SanitizedSegment> segments;

  const SanitizedSegment* Find(SegmentRole role) const;
  friend bool operator==(const BundleEntry&, const BundleEntry&) = default;
};

// Everything that leaves the device.
struct SanitizedBundle {
  UserRequest request;
  PrivacyPreference preference;
  uint64_t seed = 0;
  std::vector<BundleEntry> entries;

  size_t PayloadCount() const;
  friend bool operator==(const SanitizedBundle&,
                         const SanitizedBundle&) = default;
};

struct ReferenceImage {
  std::string name;
  imaging::RasterImage image;
};

// Loads every image the manifest lists from `images_dir`, in manifest order.
absl::StatusOr<std::vector<ReferenceImage>> LoadReferenceImages(
    const std::filesystem::path& images_dir,
    const SegmentationManifest& manifest);

absl::StatusOr<SanitizedBundle> BuildBundle(
    const UserRequest& request, const std::vector<ReferenceImage>& images,
    const SegmentationManifest& manifest, const PrivacyPreference& preference,
    const SanitizeOptions& options = {});

// Pastes the nonzero pixels of every payload onto a zero canvas, background
// first so targets end up on top. Text-only segments add nothing. The
// canvas uses the richest pixel format among the payloads.
absl::StatusOr<imaging::RasterImage> RenderBundleCanvas(
    const BundleEntry& entry);

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_SANITIZE_H_
