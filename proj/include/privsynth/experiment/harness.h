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

#ifndef PRIVSYNTH_EXPERIMENT_HARNESS_H_
#define PRIVSYNTH_EXPERIMENT_HARNESS_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/metrics/embedding_provider.h"
#include "privsynth/metrics/report.h"
#include "privsynth/orchestrator/assemble.h"
#include "privsynth/sanitizer/sanitize.h"
#include "privsynth/utility/evaluate.h"

namespace privsynth::experiment {

// Backends an experiment talks to. Not owned. `features` may be null when
// no preference uses pose or layout features.
struct Backends {
  orchestrator::GenerationBackend* generation = nullptr;
  metrics::EmbeddingProvider* embedding = nullptr;
  utility::TrainingBackend* training = nullptr;
  sanitizer::FeatureService* features = nullptr;
};

struct HarnessOptions {
  uint64_t seed = 0;
  sanitizer::SanitizeOptions sanitize;
  orchestrator::GenerateOptions generate;
  double train_fraction = 0.8;
  // Defaults to DefaultTrainingConfig of the task.
  std::optional<Json> training_config;
  metrics::SimMode sim_mode = metrics::SimMode::kAllPairs;
  // Skip training when false or when the test set is empty.
  bool evaluate_utility = true;
  int parallelism = 1;
};

struct ExperimentInputs {
  sanitizer::UserRequest request;
  std::vector<sanitizer::ReferenceImage> images;
  sanitizer::SegmentationManifest manifest;
  orchestrator::SyntheticDataset test_set;
};

struct TradeoffRow {
  metrics::PrivacyReport privacy;
  std::optional<utility::UtilityReport> utility;
  size_t synthetic_samples = 0;
};

// Sanitize, generate, embed, measure and (optionally) train for one
// preference.
absl::StatusOr<TradeoffRow> RunPreference(
    const ExperimentInputs& inputs, const sanitizer::PrivacyPreference& pref,
    const Backends& backends, const HarnessOptions& options);

absl::StatusOr<std::vector<TradeoffRow>> RunTradeoff(
    const ExperimentInputs& inputs,
    const std::vector<sanitizer::PrivacyPreference>& preferences,
    const Backends& backends, const HarnessOptions& options);

// The base preference with the noise level of `role` set to each sigma.
// The role must be L1 or L2 in `base`; noise seeds derive from the harness
// seed.
absl::StatusOr<std::vector<sanitizer::PrivacyPreference>> NoiseSweepPreferences(
    const sanitizer::PrivacyPreference& base, sanitizer::SegmentRole role,
    const std::vector<double>& sigmas);

// Embeddings of one preference run, named as GroupEmbeddings expects.
absl::StatusOr<metrics::EmbeddingTable> EmbedRun(
    const metrics::ReferenceSet& refs,
    const orchestrator::SyntheticDataset& dataset,
    metrics::EmbeddingProvider& embedder);

// preference,MI_<role>...,SIM_<role>...,utility with %.6f values and empty
// cells for missing values.
std::string TradeoffTableCsv(const std::vector<TradeoffRow>& rows,
                             const sanitizer::UserRequest& request);
// Long form for plotting: preference,role,metric,value.
std::string PlotDataCsv(const std::vector<TradeoffRow>& rows);
Json TradeoffToJson(const std::vector<TradeoffRow>& rows);

}  // namespace privsynth::experiment

#endif  // PRIVSYNTH_EXPERIMENT_HARNESS_H_
