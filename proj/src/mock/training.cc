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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "absl/strings/escaping.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/mock/backends.h"

namespace privsynth::mock {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;
using orchestrator::SyntheticDataset;
using utility::Prediction;

namespace {

constexpr char kModelPrefix[] = "mock-nm:";
// Pixels farther than this from a class color never count as that class.
constexpr double kMaxColorDistance = 60.0;

struct NearestMeanModel {
  sanitizer::TaskKind task = sanitizer::TaskKind::kClassification;
  // Classification: mean histogram per class. Detection: mean color per
  // class. Empty when the class had no training data.
  std::vector<std::vector<double>> means;
  std::vector<double> background;  // detection only
};

std::string EncodeModel(const NearestMeanModel& model) {
  Json means = Json::array();
  for (const auto& m : model.means) means.push_back(m);
  const Json doc = {{"task", sanitizer::TaskKindName(model.task)},
                    {"means", means},
                    {"background", model.background}};
  return absl::StrCat(kModelPrefix, absl::WebSafeBase64Escape(doc.dump()));
}

absl::StatusOr<NearestMeanModel> DecodeModel(const std::string& model_ref) {
  std::string text;
  if (!absl::StartsWith(model_ref, kModelPrefix) ||
      !absl::WebSafeBase64Unescape(
          absl::string_view(model_ref).substr(sizeof(kModelPrefix) - 1),
          &text)) {
    return MakeError(ErrorKind::kNotFound,
                     absl::StrCat("unknown model_ref '",
                                  model_ref.substr(0, 32), "'"));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ParseJson(text, "model_ref"));
  NearestMeanModel model;
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string task,
                             GetString(doc, "task", "model_ref"));
  PRIVSYNTH_ASSIGN_OR_RETURN(model.task, sanitizer::ParseTaskKind(task));
  try {
    model.means = doc.at("means").get<std::vector<std::vector<double>>>();
    model.background = doc.at("background").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("model_ref: ", e.what()));
  }
  return model;
}

double Distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d2 = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    d2 += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return std::sqrt(d2);
}

std::vector<double> PixelColor(const RasterImage& rgb, int x, int y) {
  return {static_cast<double>(rgb.at(x, y, 0)),
          static_cast<double>(rgb.at(x, y, 1)),
          static_cast<double>(rgb.at(x, y, 2))};
}

void Accumulate(std::vector<double>& sum, const std::vector<double>& v) {
  if (sum.empty()) sum.assign(v.size(), 0.0);
  for (size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
}

NearestMeanModel FitClassifier(const SyntheticDataset& ds,
                               const std::vector<size_t>& indices) {
  NearestMeanModel model;
  model.task = ds.task;
  model.means.resize(ds.class_names.size());
  std::vector<size_t> counts(ds.class_names.size(), 0);
  for (size_t i : indices) {
    const auto& sample = ds.samples[i];
    if (sample.class_id < 0 ||
        sample.class_id >= static_cast<int>(counts.size())) {
      continue;
    }
    Accumulate(model.means[sample.class_id], ColorHistogram(sample.image));
    ++counts[sample.class_id];
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    for (double& v : model.means[c]) v /= static_cast<double>(counts[c]);
  }
  return model;
}

NearestMeanModel FitDetector(const SyntheticDataset& ds,
                             const std::vector<size_t>& indices) {
  NearestMeanModel model;
  model.task = ds.task;
  model.means.resize(ds.class_names.size());
  std::vector<size_t> counts(ds.class_names.size(), 0);
  size_t background_count = 0;
  for (size_t i : indices) {
    const auto& sample = ds.samples[i];
    const RasterImage rgb = ConvertFormat(sample.image, PixelFormat::kRgb8);
    BitMask objects(rgb.width(), rgb.height());
    for (const auto& [index, mask] : sample.target_masks) {
      if (auto merged = objects.Union(mask); merged.ok()) objects = *merged;
    }
    const bool have_masks = objects.CountSet() > 0;
    for (const auto& labeled : sample.boxes) {
      if (labeled.class_id < 0 ||
          labeled.class_id >= static_cast<int>(counts.size())) {
        continue;
      }
      const auto& b = labeled.box;
      for (int y = b.y; y < b.y + b.h && y < rgb.height(); ++y) {
        for (int x = b.x; x < b.x + b.w && x < rgb.width(); ++x) {
          if (have_masks && !objects.at(x, y)) continue;
          Accumulate(model.means[labeled.class_id], PixelColor(rgb, x, y));
          ++counts[labeled.class_id];
        }
      }
    }
    for (int y = 0; y < rgb.height(); ++y) {
      for (int x = 0; x < rgb.width(); ++x) {
        if (have_masks && objects.at(x, y)) continue;
        Accumulate(model.background, PixelColor(rgb, x, y));
        ++background_count;
      }
    }
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    for (double& v : model.means[c]) v /= static_cast<double>(counts[c]);
  }
  for (double& v : model.background) v /= static_cast<double>(background_count);
  return model;
}

Prediction Classify(const NearestMeanModel& model, const RasterImage& image) {
  const std::vector<double> feature = ColorHistogram(image);
  std::vector<double> distances;
  int best = -1;
  for (size_t c = 0; c < model.means.size(); ++c) {
    if (model.means[c].empty()) continue;
    const double d = Distance(feature, model.means[c]);
    distances.push_back(d);
    if (best < 0 || d < Distance(feature, model.means[best])) {
      best = static_cast<int>(c);
    }
  }
  if (best < 0) return Prediction{0, 0.0, {}};
  // Softmax over negative distances.
  const double best_d = Distance(feature, model.means[best]);
  double z = 0.0;
  for (double d : distances) z += std::exp(-10.0 * (d - best_d));
  return Prediction{best, 1.0 / z, {}};
}

Prediction Detect(const NearestMeanModel& model, const RasterImage& image) {
  Prediction out;
  const RasterImage rgb = ConvertFormat(image, PixelFormat::kRgb8);
  const int w = rgb.width();
  const int h = rgb.height();
  std::vector<BitMask> class_masks(model.means.size(), BitMask(w, h));
  std::vector<std::vector<double>> class_dist(model.means.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::vector<double> p = PixelColor(rgb, x, y);
      double best = model.background.empty()
                        ? kMaxColorDistance
                        : std::min(kMaxColorDistance,
                                   Distance(p, model.background));
      int label = -1;
      for (size_t c = 0; c < model.means.size(); ++c) {
        if (model.means[c].empty()) continue;
        const double d = Distance(p, model.means[c]);
        if (d < best) {
          best = d;
          label = static_cast<int>(c);
        }
      }
      if (label >= 0) class_masks[label].set(x, y, true);
    }
  }
  const size_t min_area = std::max<size_t>(16, static_cast<size_t>(w) * h / 500);
  for (size_t c = 0; c < class_masks.size(); ++c) {
    for (const BitMask& component : Components(class_masks[c])) {
      const size_t area = component.CountSet();
      if (area < min_area) break;
      const imaging::PixelBox box = imaging::TightBox(component);
      const double fill = static_cast<double>(area) /
                          (static_cast<double>(box.w) * box.h);
      out.detections.push_back(
          {utility::BBox::From(box), static_cast<int>(c), std::min(1.0, fill)});
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<utility::TrainingRun> MockTrainingBackend::Train(
    const SyntheticDataset& train, const SyntheticDataset& validation,
    const Json& config) {
  if (train.samples.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "empty training set");
  }
  int64_t epochs = 5;
  uint64_t seed = 0;
  if (config.is_object()) {
    if (config.contains("epochs")) {
      PRIVSYNTH_ASSIGN_OR_RETURN(epochs, GetInt(config, "epochs", "config"));
    }
    if (config.contains("seed")) {
      PRIVSYNTH_ASSIGN_OR_RETURN(seed, GetUint(config, "seed", "config"));
    }
  }
  if (epochs < 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("epochs must be >= 0, got ", epochs));
  }
  std::vector<size_t> order(train.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(DeriveSeed(seed, {0x7a}));
  std::shuffle(order.begin(), order.end(), rng);

  auto fit = [&](size_t n) {
    const std::vector<size_t> subset(order.begin(), order.begin() + n);
    return train.task == sanitizer::TaskKind::kClassification
               ? FitClassifier(train, subset)
               : FitDetector(train, subset);
  };
  utility::TrainingRun run;
  run.initial_model_ref = EncodeModel(fit(0));
  std::vector<RasterImage> val_images;
  for (const auto& s : validation.samples) val_images.push_back(s.image);
  for (int64_t e = 1; e <= epochs; ++e) {
    const size_t n = static_cast<size_t>(
        (static_cast<uint64_t>(e) * order.size() + epochs - 1) / epochs);
    const std::string ref = EncodeModel(fit(n));
    double score = 0.0;
    if (!val_images.empty()) {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<Prediction> preds,
                                 Predict(ref, val_images));
      auto scored = utility::ScorePredictions(validation, preds);
      // Validation without boxes has no defined mAP; score it zero.
      if (scored.ok()) score = *scored;
    }
    run.epochs.push_back({static_cast<int>(e), score, ref});
  }
  return run;
}

absl::StatusOr<std::vector<Prediction>> MockTrainingBackend::Predict(
    const std::string& model_ref, const std::vector<RasterImage>& images) {
  PRIVSYNTH_ASSIGN_OR_RETURN(NearestMeanModel model, DecodeModel(model_ref));
  std::vector<Prediction> out;
  out.reserve(images.size());
  for (const RasterImage& image : images) {
    out.push_back(model.task == sanitizer::TaskKind::kClassification
                      ? Classify(model, image)
                      : Detect(model, image));
  }
  return out;
}

}  // namespace privsynth::mock
