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

#ifndef PRIVSYNTH_ORCHESTRATOR_DATASET_H_
#define PRIVSYNTH_ORCHESTRATOR_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/sanitizer/request.h"

namespace privsynth::orchestrator {

struct LabeledBox {
  int class_id = 0;
  imaging::PixelBox box;
  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct SampleProvenance {
  std::string prompt;
  std::string background_prompt;
  // GenerationModels::Describe() of the models used.
  std::string strategy;
  uint64_t seed = 0;
  // Preference of the dataset the sample came from; set by mixing.
  std::string source;
  friend bool operator==(const SampleProvenance&,
                         const SampleProvenance&) = default;
};

struct SyntheticSample {
  imaging::RasterImage image;
  // Classification label; -1 for detection samples.
  int class_id = -1;
  // Detection labels.
  std::vector<LabeledBox> boxes;
  // Placed target alpha per target index.
  std::map<int, imaging::BitMask> target_masks;
  SampleProvenance provenance;
  friend bool operator==(const SyntheticSample&,
                         const SyntheticSample&) = default;
};

struct SyntheticDataset {
  sanitizer::TaskKind task = sanitizer::TaskKind::kClassification;
  std::vector<std::string> class_names;
  std::string preference;
  std::string plan;
  uint64_t seed = 0;
  std::vector<SyntheticSample> samples;

  // Samples per class; for detection, objects per class.
  std::vector<size_t> ClassCounts() const;
  friend bool operator==(const SyntheticDataset&,
                         const SyntheticDataset&) = default;
};

// Classification: the label classes. Detection: the label classes when
// given, otherwise one class per target object.
std::vector<std::string> ClassNamesFor(const sanitizer::UserRequest& request);

// A sample's pixels for one role: a target's placed region, or everything
// outside all placed targets for the background.
imaging::RasterImage SampleRoleCanvas(const SyntheticSample& sample,
                                      sanitizer::SegmentRole role);

// Directory layout:
//   dataset.json         task, classes, provenance, per-sample records
//   images/00000.png
//   masks/00000_t1.png   placed target alpha
//   labels/00000.txt     detection only: "class cx cy w h", normalized
absl::Status WriteDataset(const SyntheticDataset& dataset,
                          const std::filesystem::path& dir);
absl::StatusOr<SyntheticDataset> ReadDataset(const std::filesystem::path& dir);

// Self-contained form with base64 PNG images, for the wire and artifacts.
absl::StatusOr<Json> DatasetToJson(const SyntheticDataset& dataset);
absl::StatusOr<SyntheticDataset> DatasetFromJson(const Json& doc);

// YOLO-style sidecar line for one box.
std::string FormatYoloLabel(const LabeledBox& box, int image_width,
                            int image_height);
absl::StatusOr<LabeledBox> ParseYoloLabel(std::string_view line,
                                          int image_width, int image_height);

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_DATASET_H_
