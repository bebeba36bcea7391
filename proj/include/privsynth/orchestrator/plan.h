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

#ifndef PRIVSYNTH_ORCHESTRATOR_PLAN_H_
#define PRIVSYNTH_ORCHESTRATOR_PLAN_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/orchestrator/generation_backend.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::orchestrator {

enum class FineTuneStrategy {
  kPretrainedOnly,
  kFeatureConditionedThenFinetune,
  kFinetuneOnRaw,
};

std::string_view StrategyName(FineTuneStrategy strategy);
absl::StatusOr<FineTuneStrategy> ParseStrategy(std::string_view name);

struct RolePlan {
  FineTuneStrategy strategy = FineTuneStrategy::kPretrainedOnly;
  // Feature images or raw segments, one per reference image.
  std::vector<imaging::RasterImage> payloads;
  // References synthesized per feature image before tuning.
  int synthetic_references_per_feature = 0;
};

struct FineTunePlan {
  std::map<sanitizer::SegmentRole, RolePlan> roles;

  FineTuneStrategy StrategyFor(sanitizer::SegmentRole role) const;
};

struct PlanOptions {
  int synthetic_references_per_feature = 8;
};

// Chooses each role's strategy from what its segments carry: nothing,
// feature images, or raw pixels. Pixel values never matter.
absl::StatusOr<FineTunePlan> PlanFineTune(
    const sanitizer::SanitizedBundle& bundle, const PlanOptions& options = {});

// Backend models to draw each role from, plus how they were obtained.
struct GenerationModels {
  std::map<sanitizer::SegmentRole, std::string> model_refs;
  std::map<sanitizer::SegmentRole, FineTuneStrategy> strategies;

  // "t=finetune_on_raw,b=pretrained_only"
  std::string Describe(int target_count) const;
};

// Runs the plan against a backend: pretrained roles use the stock model,
// raw roles are tuned on their segments, feature roles first synthesize
// references by conditioned generation and are then tuned on those.
absl::StatusOr<GenerationModels> PrepareModels(
    const FineTunePlan& plan, const sanitizer::UserRequest& request,
    GenerationBackend& backend, const Json& fine_tune_config, uint64_t seed);

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_PLAN_H_
