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

#include "privsynth/utility/metrics.h"

#include <algorithm>
#include <map>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::utility {

double Iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) -
                                      std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) -
                                      std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

namespace {

struct Candidate {
  size_t image;
  const Detection* detection;
};

// Long double keeps exact-looking fractions (5/6) correctly rounded.
long double AveragePrecision(const std::vector<bool>& hits, size_t positives,
                             ApInterpolation interpolation) {
  const size_t n = hits.size();
  std::vector<long double> precision(n);
  std::vector<long double> recall(n);
  size_t tp = 0;
  for (size_t k = 0; k < n; ++k) {
    if (hits[k]) ++tp;
    precision[k] = static_cast<long double>(tp) / (k + 1);
    recall[k] = static_cast<long double>(tp) / positives;
  }
  // Monotone envelope from the right.
  for (size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  if (interpolation == ApInterpolation::kElevenPoint) {
    long double sum = 0;
    for (int i = 0; i <= 10; ++i) {
      const long double r = i / 10.0L;
      long double best = 0;
      for (size_t k = 0; k < n; ++k) {
        if (recall[k] >= r - 1e-12L) {
          best = precision[k];
          break;
        }
      }
      sum += best;
    }
    return sum / 11;
  }
  // Recall only moves at hits, by 1/positives each time.
  long double sum = 0;
  for (size_t k = 0; k < n; ++k) {
    if (hits[k]) sum += precision[k];
  }
  return sum / positives;
}

}  // namespace

absl::StatusOr<double> Map50(
    const std::vector<std::vector<Detection>>& detections,
    const std::vector<std::vector<GroundTruthBox>>& ground_truth,
    const MapOptions& options) {
  if (detections.size() != ground_truth.size()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("detections for ", detections.size(),
                                  " images, ground truth for ",
                                  ground_truth.size()));
  }
  std::map<int, size_t> positives;
  for (const auto& boxes : ground_truth) {
    for (const auto& box : boxes) ++positives[box.class_id];
  }
  if (positives.empty()) {
    return MakeError(ErrorKind::kUndefinedMetric,
                     "mAP is undefined without ground truth boxes");
  }
  long double total = 0;
  for (const auto& [class_id, count] : positives) {
    std::vector<Candidate> candidates;
    for (size_t i = 0; i < detections.size(); ++i) {
      for (const auto& detection : detections[i]) {
        if (detection.class_id == class_id) candidates.push_back({i, &detection});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.detection->confidence > b.detection->confidence;
                     });
    std::vector<std::vector<bool>> matched(ground_truth.size());
    for (size_t i = 0; i < ground_truth.size(); ++i) {
      matched[i].assign(ground_truth[i].size(), false);
    }
    std::vector<bool> hits;
    hits.reserve(candidates.size());
    for (const Candidate& candidate : candidates) {
      const auto& boxes = ground_truth[candidate.image];
      double best = -1.0;
      size_t best_index = 0;
      for (size_t g = 0; g < boxes.size(); ++g) {
        if (boxes[g].class_id != class_id || matched[candidate.image][g]) {
          continue;
        }
        const double iou = Iou(candidate.detection->bbox, boxes[g].bbox);
        if (iou > best) {
          best = iou;
          best_index = g;
        }
      }
      const bool hit = best >= options.iou_threshold;
      if (hit) matched[candidate.image][best_index] = true;
      hits.push_back(hit);
    }
    total += AveragePrecision(hits, count, options.interpolation);
  }
  return static_cast<double>(total / positives.size());
}

absl::StatusOr<double> Accuracy(const std::vector<int>& predictions,
                                const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("accuracy needs equal non-empty lists, got ",
                                  predictions.size(), " predictions and ",
                                  labels.size(), " labels"));
  }
  size_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / labels.size();
}

}  // namespace privsynth::utility
