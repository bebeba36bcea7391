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

#include "privsynth/orchestrator/assemble.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "privsynth/common/parallel.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"

namespace privsynth::orchestrator {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;
using sanitizer::SegmentRole;

namespace {

enum Step : uint64_t { kGenerateStep = 1, kPlaceStep = 2, kInpaintStep = 3 };

absl::Status StepError(size_t sample, std::string_view step,
                       const std::string& prompt, const absl::Status& cause) {
  return MakeError(ErrorKind::kGenerationFailed,
                   absl::StrCat("sample ", sample, ", step ", ToStd(step),
                                ", prompt '", prompt,
                                "': ", ToStd(cause.message())));
}

bool Overlaps(const BitMask& a, const BitMask& b) {
  for (size_t i = 0; i < a.bits().size(); ++i) {
    if (a.bits()[i] && b.bits()[i]) return true;
  }
  return false;
}

struct Job {
  std::vector<const TargetPrompt*> prompts;
  int class_id = -1;
};

}  // namespace

absl::StatusOr<SyntheticDataset> AssembleDataset(
    const sanitizer::UserRequest& request, const GenerationModels& models,
    GenerationBackend& backend, const AssembleOptions& options,
    const std::string& preference) {
  PRIVSYNTH_RETURN_IF_ERROR(sanitizer::ValidateRequest(request));
  const PromptSet prompts = BuildPrompts(request);
  const bool detection = request.task_kind == sanitizer::TaskKind::kDetection;

  // Lay out the samples before generating anything.
  std::vector<Job> jobs;
  if (detection) {
    std::vector<std::vector<const TargetPrompt*>> by_target(
        request.target_count());
    for (const auto& prompt : prompts.targets) {
      by_target[prompt.target_index].push_back(&prompt);
    }
    for (int k = 0; k < options.detection_count; ++k) {
      Job job;
      for (const auto& list : by_target) {
        job.prompts.push_back(list[static_cast<size_t>(k) % list.size()]);
      }
      jobs.push_back(std::move(job));
    }
  } else {
    for (const auto& prompt : prompts.targets) {
      for (int k = 0; k < options.count_per_class; ++k) {
        jobs.push_back({{&prompt}, *prompt.class_index});
      }
    }
  }

  auto model_for = [&](SegmentRole role) -> std::string {
    auto it = models.model_refs.find(role);
    return it == models.model_refs.end() ? kPretrainedModel : it->second;
  };
  const std::string strategy = models.Describe(request.target_count());
  const int w = options.width;
  const int h = options.height;

  SyntheticDataset dataset;
  dataset.task = request.task_kind;
  dataset.class_names = ClassNamesFor(request);
  dataset.preference = preference;
  dataset.plan = strategy;
  dataset.seed = options.seed;
  dataset.samples.resize(jobs.size());

  PRIVSYNTH_RETURN_IF_ERROR(ParallelFor(
      jobs.size(), options.max_in_flight, [&](size_t k) -> absl::Status {
        const Job& job = jobs[k];
        const uint64_t sample_seed = DeriveSeed(options.seed, {k});
        SyntheticSample& sample = dataset.samples[k];
        RasterImage foreground(w, h, PixelFormat::kRgb8);
        BitMask covered(w, h);
        for (size_t o = 0; o < job.prompts.size(); ++o) {
          const TargetPrompt& prompt = *job.prompts[o];
          const SegmentRole role = SegmentRole::Target(prompt.target_index);
          auto generated =
              backend.Generate(model_for(role), prompt.text,
                               DeriveSeed(sample_seed, {kGenerateStep, o}),
                               /*want_alpha=*/true, w, h);
          if (!generated.ok()) {
            return StepError(k, "generate", prompt.text, generated.status());
          }
          const RasterImage target =
              imaging::ConvertFormat(generated->image, PixelFormat::kRgb8);
          const BitMask alpha = generated->alpha.has_value()
                                    ? *generated->alpha
                                    : imaging::NonZeroMask(generated->image);
          if (alpha.width() != target.width() ||
              alpha.height() != target.height()) {
            return StepError(k, "generate", prompt.text,
                             MakeError(ErrorKind::kInvalidArgument,
                                       "alpha size differs from image"));
          }
          absl::StatusOr<Placement> placement;
          const int attempts = detection ? options.max_placement_attempts : 1;
          for (int attempt = 0; attempt < attempts; ++attempt) {
            // Later attempts narrow the scale range toward its minimum so
            // crowded canvases still find room.
            PlacementOptions attempt_options = options.placement;
            // Several objects share the canvas area.
            attempt_options.max_scale = std::max(
                attempt_options.min_scale,
                attempt_options.max_scale /
                    std::sqrt(static_cast<double>(job.prompts.size())));
            if (attempt > 0) {
              const double shrink = static_cast<double>(attempt) / attempts;
              attempt_options.max_scale =
                  std::max(attempt_options.min_scale,
                           attempt_options.max_scale -
                               (attempt_options.max_scale -
                                attempt_options.min_scale) *
                                   shrink);
            }
            placement = SamplePlacement(
                w, h, alpha,
                DeriveSeed(sample_seed, {kPlaceStep, o,
                                         static_cast<uint64_t>(attempt)}),
                attempt_options);
            if (!placement.ok()) break;
            if (!Overlaps(placement->target_mask, covered)) break;
            placement = MakeError(ErrorKind::kPlacementInfeasible,
                                  "no non-overlapping position found");
          }
          if (!placement.ok()) {
            return Annotate(placement.status(),
                            absl::StrCat("sample ", k, ", step place, prompt '",
                                         prompt.text, "'"));
          }
          const RasterImage placed = PlaceTarget(target, alpha, *placement, w, h);
          PRIVSYNTH_ASSIGN_OR_RETURN(
              foreground,
              imaging::Composite(placed, placement->target_mask, foreground));
          PRIVSYNTH_ASSIGN_OR_RETURN(covered,
                                     covered.Union(placement->target_mask));
          sample.target_masks[prompt.target_index] = placement->target_mask;
          if (detection) {
            sample.boxes.push_back(
                {prompt.class_index.value_or(prompt.target_index),
                 placement->bbox});
          }
        }
        auto inpainted = backend.Inpaint(
            model_for(SegmentRole::Background()), foreground,
            covered.Complement(), prompts.background,
            DeriveSeed(sample_seed, {kInpaintStep}));
        if (!inpainted.ok()) {
          return StepError(k, "inpaint", prompts.background,
                           inpainted.status());
        }
        const RasterImage background =
            imaging::ConvertFormat(*inpainted, PixelFormat::kRgb8);
        if (background.width() != w || background.height() != h) {
          return StepError(k, "inpaint", prompts.background,
                           MakeError(ErrorKind::kInvalidArgument,
                                     "inpainted canvas has the wrong size"));
        }
        PRIVSYNTH_ASSIGN_OR_RETURN(
            sample.image, imaging::Composite(foreground, covered, background));
        sample.class_id = detection ? -1 : job.class_id;
        sample.provenance = {job.prompts.front()->text, prompts.background,
                             strategy, sample_seed, preference};
        return absl::OkStatus();
      }));
  return dataset;
}

absl::StatusOr<GenerationResult> GenerateFromBundle(
    const sanitizer::SanitizedBundle& bundle, GenerationBackend& backend,
    const GenerateOptions& options) {
  GenerationResult result;
  PRIVSYNTH_ASSIGN_OR_RETURN(result.plan, PlanFineTune(bundle, options.plan));
  const uint64_t model_seed = DeriveSeed(options.assemble.seed, {0xF1});
  PRIVSYNTH_ASSIGN_OR_RETURN(
      result.models,
      PrepareModels(result.plan, bundle.request, backend,
                    options.fine_tune_config, model_seed));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      result.dataset,
      AssembleDataset(bundle.request, result.models, backend, options.assemble,
                      bundle.preference.Format()));
  return result;
}

absl::StatusOr<SyntheticDataset> MixDatasets(const SyntheticDataset& a,
                                             const SyntheticDataset& b,
                                             uint64_t seed) {
  if (a.task != b.task || a.class_names != b.class_names) {
    return MakeError(ErrorKind::kIncompatibleDatasets,
                     "datasets differ in task or label classes");
  }
  SyntheticDataset out;
  out.task = a.task;
  out.class_names = a.class_names;
  out.preference = absl::StrCat(a.preference, " + ", b.preference);
  out.plan = absl::StrCat(a.plan, " + ", b.plan);
  out.seed = seed;

  auto pick = [&](const SyntheticDataset& from, std::vector<size_t> indices,
                  size_t take, uint64_t stream) {
    std::mt19937_64 rng(DeriveSeed(seed, {stream}));
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(take);
    std::sort(indices.begin(), indices.end());
    for (size_t i : indices) {
      SyntheticSample sample = from.samples[i];
      if (sample.provenance.source.empty()) {
        sample.provenance.source = from.preference;
      }
      out.samples.push_back(std::move(sample));
    }
  };
  auto split = [&](const std::vector<size_t>& in_a,
                   const std::vector<size_t>& in_b, uint64_t stream) {
    const size_t m = std::min(in_a.size(), in_b.size());
    pick(a, in_a, (m + 1) / 2, stream * 2);
    pick(b, in_b, m / 2, stream * 2 + 1);
  };

  if (a.task == sanitizer::TaskKind::kClassification) {
    for (size_t c = 0; c < a.class_names.size(); ++c) {
      std::vector<size_t> in_a;
      std::vector<size_t> in_b;
      for (size_t i = 0; i < a.samples.size(); ++i) {
        if (a.samples[i].class_id == static_cast<int>(c)) in_a.push_back(i);
      }
      for (size_t i = 0; i < b.samples.size(); ++i) {
        if (b.samples[i].class_id == static_cast<int>(c)) in_b.push_back(i);
      }
      split(in_a, in_b, c + 1);
    }
  } else {
    std::vector<size_t> in_a(a.samples.size());
    std::vector<size_t> in_b(b.samples.size());
    for (size_t i = 0; i < in_a.size(); ++i) in_a[i] = i;
    for (size_t i = 0; i < in_b.size(); ++i) in_b[i] = i;
    split(in_a, in_b, 1);
  }
  std::mt19937_64 rng(DeriveSeed(seed, {0}));
  std::shuffle(out.samples.begin(), out.samples.end(), rng);
  return out;
}

}  // namespace privsynth::orchestrator
