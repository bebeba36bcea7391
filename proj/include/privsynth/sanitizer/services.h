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

#ifndef PRIVSYNTH_SANITIZER_SERVICES_H_
#define PRIVSYNTH_SANITIZER_SERVICES_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/preference.h"

namespace privsynth::sanitizer {

// Learned feature extractors (pose, layout boxes) live behind the backend.
class FeatureService {
 public:
  virtual ~FeatureService() = default;
  virtual absl::StatusOr<imaging::RasterImage> ExtractFeature(
      const imaging::RasterImage& segment, FeatureKind kind) = 0;
};

// External detector + segmenter producing a manifest entry for one image.
class SegmentationService {
 public:
  virtual ~SegmentationService() = default;
  virtual absl::StatusOr<ManifestEntry> Segment(
      const imaging::RasterImage& image,
      const std::vector<std::string>& target_descriptions) = 0;
};

}  // namespace privsynth::sanitizer

#endif  // PRIVSYNTH_SANITIZER_SERVICES_H_
