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

#ifndef PRIVSYNTH_UTILITY_EVALUATE_H_
#define PRIVSYNTH_UTILITY_EVALUATE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/utility/metrics.h"

namespace privsynth::utility {

using orchestrator::SyntheticDataset;

// Stratified split: each class contributes floor(fraction * n_c) samples to
// training and the rest to validation. Detection samples are stratified by
// the class of their first box.
absl::StatusOr<std::pair<SyntheticDataset, SyntheticDataset>> SplitDataset(
    const SyntheticDataset& dataset, double train_fraction, uint64_t seed);

struct Prediction {
  // Classification output.
  int class_id = -1;
  double confidence = 0.0;
  // Detection output.
  std::vector<Detection> detections;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct EpochScore {
  int epoch = 0;
  double validation_score = 0.0;
  std::string model_ref;
};

struct TrainingRun {
  // The model before any epoch.
  std::string initial_model_ref;
  std::vector<EpochScore> epochs;
};

// Specialized-model training, always delegated.
class TrainingBackend {
 public:
  virtual ~TrainingBackend() = default;
  virtual absl::StatusOr<TrainingRun> Train(const SyntheticDataset& train,
                                            const SyntheticDataset& validation,
                                            const Json& config) = 0;
  virtual absl::StatusOr<std::vector<Prediction>> Predict(
      const std::string& model_ref,
      const std::vector<imaging::RasterImage>& images) = 0;
};

// MobileNet-style defaults for classification (lr 0.001, batch 128, 5
// epochs) and YOLO-style defaults for detection (lr 0.01, batch 16, 5
// epochs).
Json DefaultTrainingConfig(sanitizer::TaskKind task);

// Accuracy for classification, mAP50 for detection.
absl::StatusOr<double> ScorePredictions(const SyntheticDataset& labeled,
                                        const std::vector<Prediction>& preds);

struct UtilityReport {
  std::string metric;  // "accuracy" or "mAP50"
  double value = 0.0;
  double train_fraction = 0.8;
  size_t train_size = 0;
  size_t validation_size = 0;
  size_t test_size = 0;
  // 0 means the untrained initial model was used.
  int best_epoch = 0;
  double best_validation_score = 0.0;
  std::string model_ref;
  Json config;
};

Json UtilityReportToJson(const UtilityReport& report);
absl::StatusOr<UtilityReport> UtilityReportFromJson(const Json& doc);

// Trains, keeps the epoch with the best validation score (earliest on ties;
// the initial model when there are no epochs), and scores its predictions on
// the test set locally.
absl::StatusOr<UtilityReport> RunUtility(const SyntheticDataset& train,
                                         const SyntheticDataset& validation,
                                         const SyntheticDataset& test,
                                         TrainingBackend& backend,
                                         const Json& config,
                                         double train_fraction = 0.8);

// Predictions file: {"predictions": [{"class_id", "confidence",
// "detections": [{"class_id", "confidence", "x", "y", "w", "h"}]}]}.
Json PredictionsToJson(const std::vector<Prediction>& predictions);
absl::StatusOr<std::vector<Prediction>> PredictionsFromJson(const Json& doc);

}  // namespace privsynth::utility

#endif  // PRIVSYNTH_UTILITY_EVALUATE_H_
