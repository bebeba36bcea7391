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

#include "privsynth/orchestrator/plan.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/orchestrator/prompts.h"

namespace privsynth::orchestrator {

using sanitizer::PayloadKind;
using sanitizer::SegmentRole;

std::string_view StrategyName(FineTuneStrategy strategy) {
  switch (strategy) {
    case FineTuneStrategy::kPretrainedOnly:
      return "pretrained_only";
    case FineTuneStrategy::kFeatureConditionedThenFinetune:
      return "feature_conditioned_then_finetune";
    case FineTuneStrategy::kFinetuneOnRaw:
      return "finetune_on_raw";
  }
  return "pretrained_only";
}

absl::StatusOr<FineTuneStrategy> ParseStrategy(std::string_view name) {
  for (auto strategy : {FineTuneStrategy::kPretrainedOnly,
                        FineTuneStrategy::kFeatureConditionedThenFinetune,
                        FineTuneStrategy::kFinetuneOnRaw}) {
    if (StrategyName(strategy) == name) return strategy;
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown strategy '", ToStd(name), "'"));
}

FineTuneStrategy FineTunePlan::StrategyFor(SegmentRole role) const {
  auto it = roles.find(role);
  return it == roles.end() ? FineTuneStrategy::kPretrainedOnly
                           : it->second.strategy;
}

absl::StatusOr<FineTunePlan> PlanFineTune(
    const sanitizer::SanitizedBundle& bundle, const PlanOptions& options) {
  const int targets = bundle.request.target_count();
  FineTunePlan plan;
  for (SegmentRole role : sanitizer::RolesFor(bundle.request)) {
    std::optional<PayloadKind> kind;
    RolePlan role_plan;
    for (size_t i = 0; i < bundle.entries.size(); ++i) {
      const auto* segment = bundle.entries[i].Find(role);
      if (segment == nullptr) {
        return MakeError(ErrorKind::kInconsistentBundle,
                         absl::StrCat("image ", i, " has no segment for role ",
                                      sanitizer::RoleKey(role, targets)));
      }
      if (kind.has_value() && *kind != segment->payload_kind) {
        return MakeError(
            ErrorKind::kInconsistentBundle,
            absl::StrCat("role ", sanitizer::RoleKey(role, targets),
                         " mixes payload kinds: ",
                         ToStd(sanitizer::PayloadKindName(*kind)), " and ",
                         ToStd(sanitizer::PayloadKindName(
                             segment->payload_kind)),
                         " (image ", i, ")"));
      }
      kind = segment->payload_kind;
      if (segment->payload.has_value()) {
        role_plan.payloads.push_back(*segment->payload);
      }
    }
    switch (kind.value_or(PayloadKind::kNone)) {
      case PayloadKind::kNone:
        role_plan.strategy = FineTuneStrategy::kPretrainedOnly;
        break;
      case PayloadKind::kFeatureImage:
        role_plan.strategy = FineTuneStrategy::kFeatureConditionedThenFinetune;
        role_plan.synthetic_references_per_feature =
            options.synthetic_references_per_feature;
        break;
      case PayloadKind::kRawSegment:
        role_plan.strategy = FineTuneStrategy::kFinetuneOnRaw;
        break;
    }
    plan.roles.emplace(role, std::move(role_plan));
  }
  return plan;
}

std::string GenerationModels::Describe(int target_count) const {
  std::vector<std::string> parts;
  for (const auto& [role, strategy] : strategies) {
    parts.push_back(absl::StrCat(sanitizer::RoleKey(role, target_count), "=",
                                 ToStd(StrategyName(strategy))));
  }
  return absl::StrJoin(parts, ",");
}

absl::StatusOr<GenerationModels> PrepareModels(
    const FineTunePlan& plan, const sanitizer::UserRequest& request,
    GenerationBackend& backend, const Json& fine_tune_config, uint64_t seed) {
  const int targets = request.target_count();
  GenerationModels models;
  for (const auto& [role, role_plan] : plan.roles) {
    const std::string key = sanitizer::RoleKey(role, targets);
    const std::string text = sanitizer::RoleText(role, request);
    models.strategies[role] = role_plan.strategy;
    std::vector<imaging::RasterImage> references;
    switch (role_plan.strategy) {
      case FineTuneStrategy::kPretrainedOnly:
        models.model_refs[role] = kPretrainedModel;
        continue;
      case FineTuneStrategy::kFinetuneOnRaw:
        references = role_plan.payloads;
        break;
      case FineTuneStrategy::kFeatureConditionedThenFinetune: {
        const std::string prompt = RolePrompt(role, request);
        for (size_t i = 0; i < role_plan.payloads.size(); ++i) {
          const uint64_t condition_seed =
              DeriveSeed(seed, {0xC0, static_cast<uint64_t>(role.is_target()
                                                                ? role.target_index
                                                                : targets),
                                i});
          auto generated = backend.ConditionGenerate(
              {role_plan.payloads[i]}, prompt, condition_seed,
              role_plan.synthetic_references_per_feature);
          if (!generated.ok()) {
            return MakeError(
                ErrorKind::kGenerationFailed,
                absl::StrCat("conditioned generation for role ", key,
                             ", feature ", i, ", prompt '", prompt,
                             "': ", ToStd(generated.status().message())));
          }
          for (auto& image : *generated) references.push_back(std::move(image));
        }
        break;
      }
    }
    if (references.empty()) {
      return MakeError(ErrorKind::kInconsistentBundle,
                       absl::StrCat("role ", key, " has no reference images"));
    }
    auto model = backend.FineTune(key, text, references, fine_tune_config);
    if (!model.ok()) {
      return MakeError(ErrorKind::kGenerationFailed,
                       absl::StrCat("fine-tuning role ", key, ": ",
                                    ToStd(model.status().message())));
    }
    models.model_refs[role] = *model;
  }
  return models;
}

Json DefaultFineTuneConfig() {
  return Json{{"learning_rate", 2e-6},
              {"special_token", "xyz->style"},
              {"prior_loss_weight", 0.01},
              {"gradient_accumulation_steps", 2},
              {"max_train_steps", 800}};
}

}  // namespace privsynth::orchestrator
