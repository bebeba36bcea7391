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

#ifndef PRIVSYNTH_ORCHESTRATOR_ASSEMBLE_H_
#define PRIVSYNTH_ORCHESTRATOR_ASSEMBLE_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/orchestrator/generation_backend.h"
#include "privsynth/orchestrator/placement.h"
#include "privsynth/orchestrator/plan.h"
#include "privsynth/orchestrator/prompts.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::orchestrator {

struct AssembleOptions {
  // Classification: samples per prompt, so per class for one target.
  int count_per_class = 400;
  // Detection: total number of samples.
  int detection_count = 1600;
  uint64_t seed = 0;
  int width = 128;
  int height = 128;
  PlacementOptions placement;
  // Concurrent samples, and so concurrent backend calls.
  int max_in_flight = 4;
  // Detection: tries per object to avoid overlapping earlier objects.
  int max_placement_attempts = 16;
};

// Three steps per sample: generate each target with alpha from its role's
// model, place it on the canvas, then inpaint the background around it with
// the background model and paste the targets back on top. Classification
// labels come from the prompt's class; detection labels are the placed
// boxes. Per-sample seeds derive from (seed, sample index).
absl::StatusOr<SyntheticDataset> AssembleDataset(
    const sanitizer::UserRequest& request, const GenerationModels& models,
    GenerationBackend& backend, const AssembleOptions& options,
    const std::string& preference = "");

struct GenerateOptions {
  AssembleOptions assemble;
  PlanOptions plan;
  Json fine_tune_config = DefaultFineTuneConfig();
};

struct GenerationResult {
  FineTunePlan plan;
  GenerationModels models;
  SyntheticDataset dataset;
};

// Plan, prepare models and assemble in one go.
absl::StatusOr<GenerationResult> GenerateFromBundle(
    const sanitizer::SanitizedBundle& bundle, GenerationBackend& backend,
    const GenerateOptions& options);

// Balanced mixture: per class, min(|a_c|, |b_c|) samples, half from each
// side (the odd one from `a`), then shuffled. Detection mixes whole samples.
absl::StatusOr<SyntheticDataset> MixDatasets(const SyntheticDataset& a,
                                             const SyntheticDataset& b,
                                             uint64_t seed);

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_ASSEMBLE_H_
