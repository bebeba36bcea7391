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

#include "privsynth/utility/evaluate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "absl/strings/str_cat.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"

namespace privsynth::utility {

using orchestrator::SyntheticSample;

namespace {

int StratumOf(const SyntheticDataset& dataset, const SyntheticSample& sample) {
  if (dataset.task == sanitizer::TaskKind::kClassification) {
    return sample.class_id;
  }
  return sample.boxes.empty() ? -1 : sample.boxes.front().class_id;
}

std::string StratumName(const SyntheticDataset& dataset, int stratum) {
  if (stratum >= 0 && stratum < static_cast<int>(dataset.class_names.size())) {
    return dataset.class_names[stratum];
  }
  return "<no objects>";
}

}  // namespace

absl::StatusOr<std::pair<SyntheticDataset, SyntheticDataset>> SplitDataset(
    const SyntheticDataset& dataset, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("train fraction must be in (0, 1), got ",
                                  train_fraction));
  }
  std::map<int, std::vector<size_t>> strata;
  for (size_t i = 0; i < dataset.samples.size(); ++i) {
    strata[StratumOf(dataset, dataset.samples[i])].push_back(i);
  }
  std::vector<bool> in_train(dataset.samples.size(), false);
  for (auto& [stratum, indices] : strata) {
    if (indices.size() < 2) {
      return MakeError(ErrorKind::kUnsplittableClass,
                       absl::StrCat("class '", StratumName(dataset, stratum),
                                    "' has ", indices.size(),
                                    " sample(s); at least 2 are needed"));
    }
    std::mt19937_64 rng(
        DeriveSeed(seed, {static_cast<uint64_t>(stratum + 1)}));
    std::shuffle(indices.begin(), indices.end(), rng);
    // The epsilon keeps 0.8 * 1600 at 1280 despite binary rounding.
    const size_t take = static_cast<size_t>(
        std::floor(train_fraction * static_cast<double>(indices.size()) + 1e-9));
    for (size_t k = 0; k < take; ++k) in_train[indices[k]] = true;
  }
  SyntheticDataset train = dataset;
  SyntheticDataset validation = dataset;
  train.samples.clear();
  validation.samples.clear();
  for (size_t i = 0; i < dataset.samples.size(); ++i) {
    (in_train[i] ? train : validation).samples.push_back(dataset.samples[i]);
  }
  return std::make_pair(std::move(train), std::move(validation));
}

Json DefaultTrainingConfig(sanitizer::TaskKind task) {
  if (task == sanitizer::TaskKind::kDetection) {
    return Json{{"model", "yolov8"},
                {"learning_rate", 0.01},
                {"batch_size", 16},
                {"epochs", 5}};
  }
  return Json{{"model", "mobilenet_v2"},
              {"learning_rate", 0.001},
              {"batch_size", 128},
              {"epochs", 5}};
}

absl::StatusOr<double> ScorePredictions(const SyntheticDataset& labeled,
                                        const std::vector<Prediction>& preds) {
  if (preds.size() != labeled.samples.size()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat(preds.size(), " predictions for ",
                                  labeled.samples.size(), " samples"));
  }
  if (labeled.task == sanitizer::TaskKind::kClassification) {
    std::vector<int> predicted;
    std::vector<int> labels;
    for (size_t i = 0; i < preds.size(); ++i) {
      predicted.push_back(preds[i].class_id);
      labels.push_back(labeled.samples[i].class_id);
    }
    return Accuracy(predicted, labels);
  }
  std::vector<std::vector<Detection>> detections;
  std::vector<std::vector<GroundTruthBox>> truth;
  for (size_t i = 0; i < preds.size(); ++i) {
    detections.push_back(preds[i].detections);
    std::vector<GroundTruthBox> boxes;
    for (const auto& box : labeled.samples[i].boxes) {
      boxes.push_back({box.class_id, BBox::From(box.box)});
    }
    truth.push_back(std::move(boxes));
  }
  return Map50(detections, truth);
}

Json UtilityReportToJson(const UtilityReport& report) {
  return Json{{"metric", report.metric},
              {"value", report.value},
              {"split",
               {{"train_fraction", report.train_fraction},
                {"train", report.train_size},
                {"validation", report.validation_size},
                {"test", report.test_size}}},
              {"best_epoch", report.best_epoch},
              {"best_validation_score", report.best_validation_score},
              {"model_ref", report.model_ref},
              {"config", report.config}};
}

absl::StatusOr<UtilityReport> UtilityReportFromJson(const Json& doc) {
  UtilityReport report;
  PRIVSYNTH_ASSIGN_OR_RETURN(report.metric, GetString(doc, "metric", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.value, GetNumber(doc, "value", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* split, GetObject(doc, "split", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.train_fraction,
                             GetNumber(*split, "train_fraction", "split"));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.train_size, GetUint(*split, "train", "split"));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.validation_size,
                             GetUint(*split, "validation", "split"));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.test_size, GetUint(*split, "test", "split"));
  PRIVSYNTH_ASSIGN_OR_RETURN(int64_t best_epoch, GetInt(doc, "best_epoch", ""));
  report.best_epoch = static_cast<int>(best_epoch);
  PRIVSYNTH_ASSIGN_OR_RETURN(report.best_validation_score,
                             GetNumber(doc, "best_validation_score", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(report.model_ref, GetString(doc, "model_ref", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* config, RequireField(doc, "config", ""));
  report.config = *config;
  return report;
}

absl::StatusOr<UtilityReport> RunUtility(const SyntheticDataset& train,
                                         const SyntheticDataset& validation,
                                         const SyntheticDataset& test,
                                         TrainingBackend& backend,
                                         const Json& config,
                                         double train_fraction) {
  if (train.task != test.task || train.class_names != test.class_names) {
    return MakeError(ErrorKind::kIncompatibleDatasets,
                     "test set differs from the training data in task or "
                     "label classes");
  }
  auto run = backend.Train(train, validation, config);
  if (!run.ok()) {
    return MakeError(ErrorKind::kTrainingFailed,
                     absl::StrCat("training: ", ToStd(run.status().message())));
  }
  UtilityReport report;
  report.metric = train.task == sanitizer::TaskKind::kClassification
                      ? "accuracy"
                      : "mAP50";
  report.train_fraction = train_fraction;
  report.train_size = train.samples.size();
  report.validation_size = validation.samples.size();
  report.test_size = test.samples.size();
  report.config = config;
  report.model_ref = run->initial_model_ref;
  for (const auto& epoch : run->epochs) {
    if (report.best_epoch == 0 ||
        epoch.validation_score > report.best_validation_score) {
      report.best_epoch = epoch.epoch;
      report.best_validation_score = epoch.validation_score;
      report.model_ref = epoch.model_ref;
    }
  }
  std::vector<imaging::RasterImage> images;
  images.reserve(test.samples.size());
  for (const auto& sample : test.samples) images.push_back(sample.image);
  auto predictions = backend.Predict(report.model_ref, images);
  if (!predictions.ok()) {
    return MakeError(ErrorKind::kTrainingFailed,
                     absl::StrCat("prediction: ",
                                  ToStd(predictions.status().message())));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(report.value, ScorePredictions(test, *predictions));
  return report;
}

Json PredictionsToJson(const std::vector<Prediction>& predictions) {
  Json list = Json::array();
  for (const auto& p : predictions) {
    Json detections = Json::array();
    for (const auto& d : p.detections) {
      detections.push_back({{"class_id", d.class_id},
                            {"confidence", d.confidence},
                            {"x", d.bbox.x},
                            {"y", d.bbox.y},
                            {"w", d.bbox.w},
                            {"h", d.bbox.h}});
    }
    list.push_back({{"class_id", p.class_id},
                    {"confidence", p.confidence},
                    {"detections", detections}});
  }
  return Json{{"predictions", list}};
}

absl::StatusOr<std::vector<Prediction>> PredictionsFromJson(const Json& doc) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* list, GetArray(doc, "predictions", ""));
  std::vector<Prediction> out;
  for (size_t i = 0; i < list->size(); ++i) {
    const std::string path = IndexPath("predictions", i);
    const Json& record = (*list)[i];
    Prediction p;
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t class_id,
                               GetInt(record, "class_id", path));
    p.class_id = static_cast<int>(class_id);
    PRIVSYNTH_ASSIGN_OR_RETURN(p.confidence,
                               GetNumber(record, "confidence", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(const Json* detections,
                               GetArray(record, "detections", path));
    for (size_t j = 0; j < detections->size(); ++j) {
      const std::string dpath = IndexPath(JoinPath(path, "detections"), j);
      const Json& d = (*detections)[j];
      Detection det;
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t cls, GetInt(d, "class_id", dpath));
      det.class_id = static_cast<int>(cls);
      PRIVSYNTH_ASSIGN_OR_RETURN(det.confidence,
                                 GetNumber(d, "confidence", dpath));
      if (det.confidence < 0.0 || det.confidence > 1.0) {
        return MakeError(ErrorKind::kSchemaViolation,
                         absl::StrCat(dpath, ".confidence: outside [0, 1]"));
      }
      PRIVSYNTH_ASSIGN_OR_RETURN(det.bbox.x, GetNumber(d, "x", dpath));
      PRIVSYNTH_ASSIGN_OR_RETURN(det.bbox.y, GetNumber(d, "y", dpath));
      PRIVSYNTH_ASSIGN_OR_RETURN(det.bbox.w, GetNumber(d, "w", dpath));
      PRIVSYNTH_ASSIGN_OR_RETURN(det.bbox.h, GetNumber(d, "h", dpath));
      p.detections.push_back(det);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace privsynth::utility
