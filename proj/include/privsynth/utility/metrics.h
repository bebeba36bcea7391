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

#ifndef PRIVSYNTH_UTILITY_METRICS_H_
#define PRIVSYNTH_UTILITY_METRICS_H_

#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/ops.h"

namespace privsynth::utility {

// Axis-aligned box in pixels.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  static BBox From(const imaging::PixelBox& box) {
    return {static_cast<double>(box.x), static_cast<double>(box.y),
            static_cast<double>(box.w), static_cast<double>(box.h)};
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

// Intersection over union; 0 for disjoint boxes.
double Iou(const BBox& a, const BBox& b);

struct Detection {
  BBox bbox;
  int class_id = 0;
  double confidence = 0.0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthBox {
  int class_id = 0;
  BBox bbox;
};

enum class ApInterpolation {
  // Area under the monotone precision envelope.
  kAllPoints,
  // Mean envelope precision at recall 0, 0.1, ..., 1.
  kElevenPoint,
};

struct MapOptions {
  double iou_threshold = 0.5;
  ApInterpolation interpolation = ApInterpolation::kAllPoints;
};

// Mean over ground-truth classes of average precision. Per class,
// detections are taken in descending confidence (stable on input order) and
// each is matched to the unmatched ground truth box of its image with the
// highest IoU, if that IoU reaches the threshold.
absl::StatusOr<double> Map50(
    const std::vector<std::vector<Detection>>& detections,
    const std::vector<std::vector<GroundTruthBox>>& ground_truth,
    const MapOptions& options = {});

absl::StatusOr<double> Accuracy(const std::vector<int>& predictions,
                                const std::vector<int>& labels);

}  // namespace privsynth::utility

#endif  // PRIVSYNTH_UTILITY_METRICS_H_
