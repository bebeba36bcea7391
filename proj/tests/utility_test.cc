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
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "privsynth/common/status.h"
#include "privsynth/utility/evaluate.h"
#include "privsynth/utility/metrics.h"

namespace privsynth::utility {
namespace {

using imaging::PixelFormat;
using imaging::RasterImage;
using orchestrator::SyntheticSample;

TEST(IouTest, KnownValues) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  // Overlap 5x10 = 50, union 150.
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
}

TEST(AccuracyTest, Counting) {
  EXPECT_DOUBLE_EQ(*Accuracy({1, 2, 3}, {1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(*Accuracy({0, 0}, {1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(*Accuracy({0, 1, 1, 0}, {0, 1, 1, 1}), 0.75);
  EXPECT_EQ(ErrorKindOf(Accuracy({0, 1}, {0}).status()),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(ErrorKindOf(Accuracy({}, {}).status()),
            ErrorKind::kInvalidArgument);
}

TEST(Map50Test, WorkedExampleIsFiveSixths) {
  // Two ground truth boxes in two images; detections ranked hit, miss, hit.
  std::vector<std::vector<GroundTruthBox>> gt = {{{0, {0, 0, 10, 10}}},
                                                 {{0, {50, 50, 10, 10}}}};
  std::vector<std::vector<Detection>> det = {
      {{{0, 0, 10, 10}, 0, 0.9}, {{30, 30, 10, 10}, 0, 0.8}},
      {{{50, 50, 10, 10}, 0, 0.7}}};
  auto map = Map50(det, gt);
  ASSERT_TRUE(map.ok()) << map.status();
  EXPECT_EQ(*map, 5.0 / 6.0);
}

TEST(Map50Test, TrivialCases) {
  std::vector<std::vector<GroundTruthBox>> gt = {
      {{0, {0, 0, 10, 10}}, {1, {20, 20, 8, 8}}}};
  std::vector<std::vector<Detection>> perfect = {
      {{{0, 0, 10, 10}, 0, 1.0}, {{20, 20, 8, 8}, 1, 1.0}}};
  EXPECT_DOUBLE_EQ(*Map50(perfect, gt), 1.0);
  std::vector<std::vector<Detection>> none = {{}};
  EXPECT_DOUBLE_EQ(*Map50(none, gt), 0.0);

  std::vector<std::vector<GroundTruthBox>> empty = {{}};
  EXPECT_EQ(ErrorKindOf(Map50(none, empty).status()),
            ErrorKind::kUndefinedMetric);
}

TEST(Map50Test, DuplicateDetectionIsFalsePositive) {
  std::vector<std::vector<GroundTruthBox>> gt = {{{0, {0, 0, 10, 10}}}};
  std::vector<std::vector<Detection>> det = {
      {{{0, 0, 10, 10}, 0, 0.9}, {{0, 0, 10, 10}, 0, 0.95}}};
  // First ranked detection matches; the second is a duplicate.
  EXPECT_DOUBLE_EQ(*Map50(det, gt), 1.0);
  det[0].push_back({{0, 0, 10, 10}, 0, 0.99});
  EXPECT_DOUBLE_EQ(*Map50(det, gt), 1.0);
}

// Independent oracle: for every ranking prefix the matching is rebuilt from
// scratch, giving one (recall, precision) point per prefix. AP is the area
// under max{precision at recall >= r}, integrated over the distinct recalls.
double OracleMap(const std::vector<std::vector<Detection>>& det,
                 const std::vector<std::vector<GroundTruthBox>>& gt) {
  std::set<int> classes;
  for (const auto& boxes : gt) {
    for (const auto& b : boxes) classes.insert(b.class_id);
  }
  double sum = 0.0;
  for (int cls : classes) {
    struct Ranked {
      size_t image;
      Detection d;
      size_t order;
    };
    std::vector<Ranked> ranked;
    size_t order = 0;
    for (size_t i = 0; i < det.size(); ++i) {
      for (const auto& d : det[i]) {
        if (d.class_id == cls) ranked.push_back({i, d, order});
        ++order;
      }
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const Ranked& a, const Ranked& b) {
                if (a.d.confidence != b.d.confidence) {
                  return a.d.confidence > b.d.confidence;
                }
                return a.order < b.order;
              });
    int positives = 0;
    for (const auto& boxes : gt) {
      for (const auto& b : boxes) positives += b.class_id == cls;
    }
    std::vector<std::pair<double, double>> points;  // (recall, precision)
    for (size_t k = 1; k <= ranked.size(); ++k) {
      std::set<std::pair<size_t, size_t>> used;
      int tp = 0;
      for (size_t j = 0; j < k; ++j) {
        int best = -1;
        double best_iou = -1.0;
        const auto& boxes = gt[ranked[j].image];
        for (size_t g = 0; g < boxes.size(); ++g) {
          if (boxes[g].class_id != cls || used.count({ranked[j].image, g})) {
            continue;
          }
          const double v = Iou(ranked[j].d.bbox, boxes[g].bbox);
          if (v > best_iou) {
            best_iou = v;
            best = static_cast<int>(g);
          }
        }
        if (best >= 0 && best_iou >= 0.5) {
          used.insert({ranked[j].image, static_cast<size_t>(best)});
          ++tp;
        }
      }
      points.push_back({static_cast<double>(tp) / positives,
                        static_cast<double>(tp) / static_cast<double>(k)});
    }
    std::set<double> recalls;
    for (const auto& p : points) recalls.insert(p.first);
    double ap = 0.0;
    double prev = 0.0;
    for (double r : recalls) {
      if (r <= 0.0) continue;
      double envelope = 0.0;
      for (const auto& p : points) {
        if (p.first >= r) envelope = std::max(envelope, p.second);
      }
      ap += (r - prev) * envelope;
      prev = r;
    }
    sum += ap;
  }
  return sum / static_cast<double>(classes.size());
}

TEST(Map50Test, MatchesPrCurveOracleOnRandomInstances) {
  std::mt19937_64 rng(20240611);
  // A coarse grid makes IoU ties, exact 0.5 overlaps and confidence ties
  // common.
  auto coord = [&rng] { return 4.0 * static_cast<double>(rng() % 6); };
  auto extent = [&rng] { return 4.0 * static_cast<double>(1 + rng() % 4); };
  int checked = 0;
  while (checked < 500) {
    const size_t images = 1 + rng() % 3;
    const int classes = 1 + static_cast<int>(rng() % 3);
    const size_t gt_total = 1 + rng() % 6;
    const size_t det_total = rng() % 7;
    std::vector<std::vector<GroundTruthBox>> gt(images);
    std::vector<std::vector<Detection>> det(images);
    for (size_t k = 0; k < gt_total; ++k) {
      gt[rng() % images].push_back({static_cast<int>(rng() % classes),
                                    {coord(), coord(), extent(), extent()}});
    }
    for (size_t k = 0; k < det_total; ++k) {
      det[rng() % images].push_back(
          {{coord(), coord(), extent(), extent()},
           static_cast<int>(rng() % classes),
           static_cast<double>(1 + rng() % 5) / 5.0});
    }
    // Copy some ground truth boxes as detections so hits are frequent.
    for (size_t i = 0; i < images; ++i) {
      for (const auto& g : gt[i]) {
        if (rng() % 2 == 0) {
          det[i].push_back({g.bbox, g.class_id,
                            static_cast<double>(1 + rng() % 5) / 5.0});
        }
      }
    }
    auto map = Map50(det, gt);
    ASSERT_TRUE(map.ok()) << map.status();
    ASSERT_NEAR(*map, OracleMap(det, gt), 1e-9) << "instance " << checked;
    ++checked;
  }
}

SyntheticDataset MakeDataset(const std::vector<int>& per_class) {
  SyntheticDataset ds;
  for (size_t c = 0; c < per_class.size(); ++c) {
    ds.class_names.push_back("class" + std::to_string(c));
  }
  for (size_t c = 0; c < per_class.size(); ++c) {
    for (int k = 0; k < per_class[c]; ++k) {
      SyntheticSample s;
      s.image = RasterImage(1, 1, PixelFormat::kGray8,
                            static_cast<uint8_t>(k % 256));
      s.class_id = static_cast<int>(c);
      s.provenance.seed = ds.samples.size();
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

std::vector<uint64_t> Ids(const SyntheticDataset& ds) {
  std::vector<uint64_t> ids;
  for (const auto& s : ds.samples) ids.push_back(s.provenance.seed);
  return ids;
}

TEST(SplitTest, EightyTwentyOnSixteenHundred) {
  const SyntheticDataset ds = MakeDataset({400, 400, 400, 400});
  auto split = SplitDataset(ds, 0.8, 7);
  ASSERT_TRUE(split.ok()) << split.status();
  const auto& [train, val] = *split;
  EXPECT_EQ(train.samples.size(), 1280u);
  EXPECT_EQ(val.samples.size(), 320u);
  EXPECT_EQ(train.ClassCounts(), (std::vector<size_t>{320, 320, 320, 320}));
  EXPECT_EQ(val.ClassCounts(), (std::vector<size_t>{80, 80, 80, 80}));

  std::vector<uint64_t> all = Ids(train);
  const std::vector<uint64_t> v = Ids(val);
  all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  std::vector<uint64_t> expected(1600);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
}

TEST(SplitTest, DeterministicAndSeedSensitive) {
  const SyntheticDataset ds = MakeDataset({10, 10});
  auto a = SplitDataset(ds, 0.5, 1);
  auto b = SplitDataset(ds, 0.5, 1);
  auto c = SplitDataset(ds, 0.5, 2);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_EQ(Ids(a->first), Ids(b->first));
  EXPECT_NE(Ids(a->first), Ids(c->first));
}

TEST(SplitTest, TwoPerClassHalves) {
  auto split = SplitDataset(MakeDataset({2, 2, 2}), 0.5, 3);
  ASSERT_TRUE(split.ok());
  EXPECT_EQ(split->first.ClassCounts(), (std::vector<size_t>{1, 1, 1}));
  EXPECT_EQ(split->second.ClassCounts(), (std::vector<size_t>{1, 1, 1}));
}

TEST(SplitTest, Errors) {
  EXPECT_EQ(ErrorKindOf(SplitDataset(MakeDataset({5, 1}), 0.8, 0).status()),
            ErrorKind::kUnsplittableClass);
  EXPECT_EQ(ErrorKindOf(SplitDataset(MakeDataset({5}), 1.0, 0).status()),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(ErrorKindOf(SplitDataset(MakeDataset({5}), 0.0, 0).status()),
            ErrorKind::kInvalidArgument);
}

TEST(TrainingConfigTest, Defaults) {
  const Json cls = DefaultTrainingConfig(sanitizer::TaskKind::kClassification);
  EXPECT_EQ(cls["model"], "mobilenet_v2");
  EXPECT_EQ(cls["batch_size"], 128);
  EXPECT_EQ(cls["epochs"], 5);
  EXPECT_DOUBLE_EQ(cls["learning_rate"].get<double>(), 0.001);
  const Json det = DefaultTrainingConfig(sanitizer::TaskKind::kDetection);
  EXPECT_EQ(det["batch_size"], 16);
  EXPECT_EQ(det["epochs"], 5);
  EXPECT_DOUBLE_EQ(det["learning_rate"].get<double>(), 0.01);
}

// Scripted backend: each model ref predicts a fixed label for every image.
class ScriptedBackend : public TrainingBackend {
 public:
  ScriptedBackend(std::vector<double> scores, bool fail = false)
      : scores_(std::move(scores)), fail_(fail) {}

  absl::StatusOr<TrainingRun> Train(const SyntheticDataset&,
                                    const SyntheticDataset&,
                                    const Json&) override {
    if (fail_) return absl::UnavailableError("worker lost");
    TrainingRun run;
    run.initial_model_ref = "label:0";
    for (size_t e = 0; e < scores_.size(); ++e) {
      run.epochs.push_back({static_cast<int>(e + 1), scores_[e],
                            "label:" + std::to_string(e + 1)});
    }
    return run;
  }

  absl::StatusOr<std::vector<Prediction>> Predict(
      const std::string& model_ref,
      const std::vector<RasterImage>& images) override {
    predicted_with = model_ref;
    const int label = std::stoi(model_ref.substr(6));
    return std::vector<Prediction>(images.size(), Prediction{label, 1.0, {}});
  }

  std::string predicted_with;

 private:
  std::vector<double> scores_;
  bool fail_;
};

TEST(RunUtilityTest, PicksEarliestBestEpoch) {
  const SyntheticDataset train = MakeDataset({4, 4, 4, 4});
  const SyntheticDataset test = MakeDataset({1, 1, 1, 1});
  ScriptedBackend backend({0.2, 0.7, 0.5, 0.7, 0.1});
  auto report = RunUtility(train, train, test, backend, Json::object());
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->best_epoch, 2);
  EXPECT_EQ(backend.predicted_with, "label:2");
  EXPECT_EQ(report->metric, "accuracy");
  // Label 2 is right for one of four test samples.
  EXPECT_DOUBLE_EQ(report->value, 0.25);

  auto round_trip = UtilityReportFromJson(UtilityReportToJson(*report));
  ASSERT_TRUE(round_trip.ok()) << round_trip.status();
  EXPECT_EQ(round_trip->best_epoch, 2);
  EXPECT_EQ(round_trip->test_size, 4u);
}

TEST(RunUtilityTest, ZeroEpochsUsesInitialModel) {
  const SyntheticDataset ds = MakeDataset({2, 2});
  ScriptedBackend backend({});
  auto report = RunUtility(ds, ds, ds, backend, Json{{"epochs", 0}});
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->best_epoch, 0);
  EXPECT_EQ(backend.predicted_with, "label:0");
  EXPECT_DOUBLE_EQ(report->value, 0.5);
}

TEST(RunUtilityTest, BackendFailureIsTrainingFailed) {
  const SyntheticDataset ds = MakeDataset({2, 2});
  ScriptedBackend backend({0.5}, /*fail=*/true);
  EXPECT_EQ(ErrorKindOf(RunUtility(ds, ds, ds, backend, {}).status()),
            ErrorKind::kTrainingFailed);
}

TEST(PredictionsTest, JsonRoundTrip) {
  std::vector<Prediction> preds = {
      {2, 0.75, {}}, {-1, 0.0, {{{1, 2, 3, 4}, 1, 0.5}}}};
  auto back = PredictionsFromJson(PredictionsToJson(preds));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, preds);
}

}  // namespace
}  // namespace privsynth::utility
