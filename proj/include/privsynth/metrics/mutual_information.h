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

#ifndef PRIVSYNTH_METRICS_MUTUAL_INFORMATION_H_
#define PRIVSYNTH_METRICS_MUTUAL_INFORMATION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/request.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::metrics {

// Intensity histogram of the grayscale rendering of an image.
struct Histogram256 {
  std::array<uint64_t, 256> counts{};
  uint64_t total = 0;

  static Histogram256 Of(const imaging::RasterImage& image);
};

// Shannon entropy in bits of the 256-bin intensity histogram.
double EntropyBits(const imaging::RasterImage& image);

// Pixelwise mutual information in bits from the joint 256x256 histogram of
// co-located grayscale intensities.
absl::StatusOr<double> ImageMiBits(const imaging::RasterImage& a,
                                   const imaging::RasterImage& b);

// Raw per-role canvases of the reference images, co-registered per image.
struct ReferenceSet {
  struct Entry {
    std::string name;
    std::map<sanitizer::SegmentRole, imaging::RasterImage> canvases;
  };
  sanitizer::UserRequest request;
  std::vector<Entry> entries;

  static absl::StatusOr<ReferenceSet> Build(
      const sanitizer::UserRequest& request,
      const std::vector<sanitizer::ReferenceImage>& images,
      const sanitizer::SegmentationManifest& manifest);

  // Directory form: refs.json plus one PNG per image and role.
  absl::Status Write(const std::filesystem::path& dir) const;
  static absl::StatusOr<ReferenceSet> Read(const std::filesystem::path& dir);
};

struct MiOptions {
  int parallelism = 1;
};

// Mean over images of MI(raw role canvas, rendered bundle canvas) divided by
// the raw canvas entropy, clamped to [0, 1].
absl::StatusOr<double> NormalizedMi(const ReferenceSet& refs,
                                    const sanitizer::SanitizedBundle& bundle,
                                    sanitizer::SegmentRole role,
                                    const MiOptions& options = {});

}  // namespace privsynth::metrics

#endif  // PRIVSYNTH_METRICS_MUTUAL_INFORMATION_H_
