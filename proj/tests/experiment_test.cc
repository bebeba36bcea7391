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

#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "privsynth/common/status.h"
#include "privsynth/experiment/corpus.h"
#include "privsynth/experiment/harness.h"
#include "privsynth/mock/backends.h"

namespace privsynth::experiment {
namespace {

using sanitizer::PrivacyPreference;
using sanitizer::SegmentRole;

struct MockBackends {
  mock::MockGenerationBackend generation;
  mock::MockEmbeddingProvider embedding;
  mock::MockTrainingBackend training;
  mock::MockFeatureService features;
  Backends view() {
    return {&generation, &embedding, &training, &features};
  }
};

ExperimentInputs Inputs(const Corpus& corpus) {
  return {corpus.request, corpus.images, corpus.manifest, corpus.test_set};
}

std::vector<PrivacyPreference> Prefs(std::string_view list) {
  auto prefs = sanitizer::ParsePreferenceList(list);
  EXPECT_TRUE(prefs.ok()) << prefs.status();
  return *prefs;
}

HarnessOptions FastOptions() {
  HarnessOptions options;
  options.seed = 3;
  options.generate.assemble.count_per_class = 10;
  options.generate.assemble.detection_count = 40;
  options.generate.assemble.width = 64;
  options.generate.assemble.height = 64;
  options.generate.plan.synthetic_references_per_feature = 2;
  return options;
}

TEST(CorpusTest, ShapesAndRoundTrip) {
  CorpusOptions options;
  options.reference_images = 6;
  options.test_images = 3;
  options.seed = 1;
  auto corpus = MakeCorpus(options);
  ASSERT_TRUE(corpus.ok()) << corpus.status();
  EXPECT_EQ(corpus->images.size(), 6u);
  EXPECT_EQ(corpus->manifest.entries.size(), 6u);
  EXPECT_EQ(corpus->test_set.samples.size(), 12u);
  EXPECT_EQ(corpus->test_set.ClassCounts(), (std::vector<size_t>{3, 3, 3, 3}));

  const auto dir = std::filesystem::path(::testing::TempDir()) / "corpus_rt";
  std::filesystem::remove_all(dir);
  ASSERT_TRUE(WriteCorpus(*corpus, dir).ok());
  auto back = ReadCorpus(dir);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->request, corpus->request);
  EXPECT_EQ(back->test_set, corpus->test_set);
  ASSERT_EQ(back->images.size(), 6u);
  EXPECT_EQ(back->images[2].image, corpus->images[2].image);
}

TEST(HarnessTest, TargetLevelsRaiseTargetLeakage) {
  CorpusOptions corpus_options;
  corpus_options.test_images = 5;
  auto corpus = MakeCorpus(corpus_options);
  ASSERT_TRUE(corpus.ok());
  MockBackends backends;
  auto rows = RunTradeoff(Inputs(*corpus), Prefs("t=L0,b=L0;t=L1,b=L0;t=L2,b=L0"),
                          backends.view(), FastOptions());
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 3u);
  const double mi0 = (*rows)[0].privacy.Find("t")->mi;
  const double mi1 = (*rows)[1].privacy.Find("t")->mi;
  const double mi2 = (*rows)[2].privacy.Find("t")->mi;
  EXPECT_EQ(mi0, 0.0);
  EXPECT_GT(mi1, mi0);
  EXPECT_GT(mi2, mi1);
  EXPECT_EQ((*rows)[0].privacy.Find("b")->mi, 0.0);
  // The shared target still reveals where the background is not.
  EXPECT_LT((*rows)[2].privacy.Find("b")->mi, mi2);
  for (const auto& row : *rows) {
    ASSERT_TRUE(row.utility.has_value());
    EXPECT_EQ(row.utility->test_size, 20u);
  }
  EXPECT_GT(*(*rows)[2].privacy.Find("t")->sim,
            *(*rows)[0].privacy.Find("t")->sim);
  const std::string csv = TradeoffTableCsv(*rows, corpus->request);
  const std::vector<std::string> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "preference,MI_t,MI_b,SIM_t,SIM_b,utility");
}

TEST(HarnessTest, NoiseSweepPreferences) {
  auto base = PrivacyPreference::Parse("t=L2,b=L0");
  ASSERT_TRUE(base.ok());
  auto prefs = NoiseSweepPreferences(*base, SegmentRole::Target(0), {5, 10, 50});
  ASSERT_TRUE(prefs.ok()) << prefs.status();
  ASSERT_EQ(prefs->size(), 3u);
  EXPECT_EQ((*prefs)[2].Format(), "t=L2@50,b=L0");
  EXPECT_EQ(ErrorKindOf(NoiseSweepPreferences(*base, SegmentRole::Background(),
                                              {5})
                            .status()),
            ErrorKind::kInvalidArgument);
}

TEST(HarnessTest, ReproducibleForSeed) {
  CorpusOptions corpus_options;
  corpus_options.reference_images = 4;
  corpus_options.test_images = 2;
  auto corpus = MakeCorpus(corpus_options);
  ASSERT_TRUE(corpus.ok());
  MockBackends backends;
  HarnessOptions options = FastOptions();
  options.generate.assemble.count_per_class = 3;
  auto a = RunTradeoff(Inputs(*corpus), Prefs("t=L2,b=L1"), backends.view(),
                       options);
  options.parallelism = 4;
  options.generate.assemble.max_in_flight = 1;
  auto b = RunTradeoff(Inputs(*corpus), Prefs("t=L2,b=L1"), backends.view(),
                       options);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(TradeoffToJson(*a).dump(), TradeoffToJson(*b).dump());
  EXPECT_EQ(PlotDataCsv(*a), PlotDataCsv(*b));
}

TEST(HarnessTest, DetectionCorpusRuns) {
  CorpusOptions corpus_options;
  corpus_options.task = sanitizer::TaskKind::kDetection;
  corpus_options.reference_images = 6;
  corpus_options.test_images = 10;
  auto corpus = MakeCorpus(corpus_options);
  ASSERT_TRUE(corpus.ok()) << corpus.status();
  MockBackends backends;
  auto rows = RunTradeoff(Inputs(*corpus), Prefs("t=L1,b=L2"), backends.view(),
                          FastOptions());
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_TRUE((*rows)[0].utility.has_value());
  EXPECT_EQ((*rows)[0].utility->metric, "mAP50");
  EXPECT_GE((*rows)[0].utility->value, 0.0);
  EXPECT_LE((*rows)[0].utility->value, 1.0);
}

}  // namespace
}  // namespace privsynth::experiment
