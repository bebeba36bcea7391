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

#include "privsynth/sanitizer/sanitize.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "privsynth/common/parallel.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/noise.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/png_io.h"

namespace privsynth::sanitizer {
namespace {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

absl::StatusOr<RasterImage> ExtractFeature(const RasterImage& canvas,
                                           FeatureKind kind,
                                           const SanitizeOptions& options) {
  if (kind == FeatureKind::kCanny) {
    return imaging::CannyEdges(canvas, options.canny);
  }
  if (options.feature_service == nullptr) {
    return MakeError(ErrorKind::kBackendUnavailable,
                     absl::StrCat("no feature service configured for ",
                                  ToStd(FeatureKindName(kind)), " features"));
  }
  return options.feature_service->ExtractFeature(canvas, kind);
}

int FormatRank(PixelFormat format) { return imaging::ChannelCount(format); }

}  // namespace

absl::StatusOr<std::vector<Segment>> SplitSegments(const RasterImage& image,
                                                   const ManifestEntry& entry,
                                                   const UserRequest& request) {
  PRIVSYNTH_ASSIGN_OR_RETURN(
      ManifestEntry normalized,
      NormalizeEntry(entry, image.width(), image.height(), request));
  std::vector<Segment> segments;
  for (SegmentRole role : RolesFor(request)) {
    const BitMask* mask = normalized.MaskFor(role);
    if (mask == nullptr) {
      return MakeError(
          ErrorKind::kIncompleteSegmentation,
          absl::StrCat(entry.image_name, ": no mask for role ",
                       RoleKey(role, request.target_count()), " (",
                       RoleText(role, request), ")"));
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage canvas,
                               imaging::ApplyMask(image, *mask));
    segments.push_back({role, std::move(canvas), *mask});
  }
  return segments;
}

std::string_view PayloadKindName(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kNone:
      return "none";
    case PayloadKind::kFeatureImage:
      return "feature_image";
    case PayloadKind::kRawSegment:
      return "raw_segment";
  }
  return "none";
}

absl::StatusOr<PayloadKind> ParsePayloadKind(std::string_view name) {
  if (name == "none") return PayloadKind::kNone;
  if (name == "feature_image") return PayloadKind::kFeatureImage;
  if (name == "raw_segment") return PayloadKind::kRawSegment;
  return MakeError(ErrorKind::kSchemaViolation,
                   absl::StrCat("unknown payload kind '",
                                ToStd(name), "'"));
}

PayloadKind ExpectedPayload(Level level) {
  switch (level) {
    case Level::kL0:
      return PayloadKind::kNone;
    case Level::kL1:
      return PayloadKind::kFeatureImage;
    case Level::kL2:
      return PayloadKind::kRawSegment;
  }
  return PayloadKind::kNone;
}

uint64_t NoiseSeed(const SanitizeOptions& options,
                   const imaging::NoiseParams& noise, size_t image_index,
                   SegmentRole role, int target_count) {
  const uint64_t ordinal =
      role.is_target() ? role.target_index : target_count;
  return DeriveSeed(options.seed, {noise.seed, image_index, ordinal});
}

absl::StatusOr<SanitizedSegment> SanitizeSegment(
    const Segment& segment, const SanitizationLevel& level,
    const UserRequest& request, const SanitizeOptions& options,
    size_t image_index) {
  PRIVSYNTH_RETURN_IF_ERROR(level.Validate());
  PRIVSYNTH_RETURN_IF_ERROR(ValidateRole(segment.role, request));
  SanitizedSegment out;
  out.role = segment.role;
  out.text = RoleText(segment.role, request);
  out.scheme = level;
  out.payload_kind = ExpectedPayload(level.level);
  if (level.level == Level::kL0) return out;

  std::optional<imaging::NoiseParams> noise;
  if (level.noise.has_value()) {
    noise = imaging::NoiseParams{
        level.noise->sigma,
        NoiseSeed(options, *level.noise, image_index, segment.role,
                  request.target_count())};
  }
  // Noise stays inside the role's mask so pixels of other roles never
  // influence this payload.
  auto add_noise = [&](const RasterImage& image) -> absl::StatusOr<RasterImage> {
    if (!noise.has_value()) return image;
    return imaging::AddGaussianNoise(image, segment.mask, *noise);
  };

  if (level.level == Level::kL2) {
    PRIVSYNTH_ASSIGN_OR_RETURN(out.payload, add_noise(segment.canvas));
    return out;
  }
  if (options.noise_order == NoiseOrder::kBeforeFeature) {
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage noisy, add_noise(segment.canvas));
    PRIVSYNTH_ASSIGN_OR_RETURN(out.payload,
                               ExtractFeature(noisy, *level.feature, options));
  } else {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RasterImage feature,
        ExtractFeature(segment.canvas, *level.feature, options));
    if (noise.has_value()) {
      BitMask all(feature.width(), feature.height(), true);
      PRIVSYNTH_ASSIGN_OR_RETURN(
          out.payload, imaging::AddGaussianNoise(feature, all, *noise));
    } else {
      out.payload = std::move(feature);
    }
  }
  if (out.payload->width() != segment.canvas.width() ||
      out.payload->height() != segment.canvas.height()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("feature image is ", out.payload->width(),
                                  "x", out.payload->height(),
                                  ", segment is ", segment.canvas.width(), "x",
                                  segment.canvas.height()));
  }
  return out;
}

const SanitizedSegment* BundleEntry::Find(SegmentRole role) const {
  for (const auto& segment : segments) {
    if (segment.role == role) return &segment;
  }
  return nullptr;
}

size_t SanitizedBundle::PayloadCount() const {
  size_t count = 0;
  for (const auto& entry : entries) {
    for (const auto& segment : entry.segments) {
      if (segment.payload.has_value()) ++count;
    }
  }
  return count;
}

absl::StatusOr<std::vector<ReferenceImage>> LoadReferenceImages(
    const std::filesystem::path& images_dir,
    const SegmentationManifest& manifest) {
  std::vector<ReferenceImage> images;
  images.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage image,
                               imaging::ReadPng(images_dir / entry.image_name));
    images.push_back({entry.image_name, std::move(image)});
  }
  return images;
}

absl::StatusOr<SanitizedBundle> BuildBundle(
    const UserRequest& request, const std::vector<ReferenceImage>& images,
    const SegmentationManifest& manifest, const PrivacyPreference& preference,
    const SanitizeOptions& options) {
  PRIVSYNTH_RETURN_IF_ERROR(ValidateRequest(request));
  PRIVSYNTH_RETURN_IF_ERROR(preference.ValidateFor(request));
  SanitizedBundle bundle{request, preference, options.seed, {}};
  bundle.entries.resize(images.size());
  PRIVSYNTH_RETURN_IF_ERROR(ParallelFor(
      images.size(), options.parallelism, [&](size_t i) -> absl::Status {
        const ReferenceImage& ref = images[i];
        const std::string context = absl::StrCat("image ", i);
        const ManifestEntry* entry = manifest.Find(ref.name);
        if (entry == nullptr) {
          return MakeError(ErrorKind::kIncompleteSegmentation,
                           absl::StrCat(context, ": no manifest entry for ",
                                        ref.name));
        }
        auto segments = SplitSegments(ref.image, *entry, request);
        if (!segments.ok()) return Annotate(segments.status(), context);
        BundleEntry& out = bundle.entries[i];
        out.image_name = ref.name;
        out.width = ref.image.width();
        out.height = ref.image.height();
        for (const Segment& segment : *segments) {
          auto sanitized = SanitizeSegment(
              segment, *preference.Find(segment.role), request, options, i);
          if (!sanitized.ok()) return Annotate(sanitized.status(), context);
          out.segments.push_back(std::move(*sanitized));
        }
        return absl::OkStatus();
      }));
  return bundle;
}

absl::StatusOr<RasterImage> RenderBundleCanvas(const BundleEntry& entry) {
  PixelFormat format = PixelFormat::kGray8;
  for (const auto& segment : entry.segments) {
    if (!segment.payload.has_value()) continue;
    if (segment.payload->width() != entry.width ||
        segment.payload->height() != entry.height) {
      return MakeError(
          ErrorKind::kInvalidArgument,
          absl::StrCat(entry.image_name, ": payload is ",
                       segment.payload->width(), "x", segment.payload->height(),
                       ", canvas is ", entry.width, "x", entry.height));
    }
    if (FormatRank(segment.payload->format()) > FormatRank(format)) {
      format = segment.payload->format();
    }
  }
  RasterImage canvas(entry.width, entry.height, format);
  std::vector<const SanitizedSegment*> order;
  for (const auto& segment : entry.segments) order.push_back(&segment);
  // Background first, then targets in index order.
  std::stable_sort(order.begin(), order.end(),
                   [](const SanitizedSegment* a, const SanitizedSegment* b) {
                     return a->role.is_target() < b->role.is_target() ||
                            (a->role.is_target() && b->role.is_target() &&
                             a->role.target_index < b->role.target_index);
                   });
  const int channels = canvas.channels();
  for (const SanitizedSegment* segment : order) {
    if (!segment->payload.has_value()) continue;
    const RasterImage layer = imaging::ConvertFormat(*segment->payload, format);
    for (int y = 0; y < entry.height; ++y) {
      for (int x = 0; x < entry.width; ++x) {
        if (!segment->payload->IsNonZero(x, y)) continue;
        for (int c = 0; c < channels; ++c) canvas.set(x, y, c, layer.at(x, y, c));
      }
    }
  }
  return canvas;
}

}  // namespace privsynth::sanitizer
