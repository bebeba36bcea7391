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

#ifndef PRIVSYNTH_ORCHESTRATOR_GENERATION_BACKEND_H_
#define PRIVSYNTH_ORCHESTRATOR_GENERATION_BACKEND_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::orchestrator {

// Model reference naming the backend's untuned generator.
inline constexpr char kPretrainedModel[] = "pretrained";

struct GeneratedImage {
  imaging::RasterImage image;
  // Present when alpha was requested.
  std::optional<imaging::BitMask> alpha;
};

struct BackendCapabilities {
  std::string provider;
  // False when generate/inpaint may differ for a fixed (model, prompt, seed).
  bool deterministic = true;
  std::vector<std::string> endpoints;
};

// Diffusion-side operations the orchestrator relies on. Implementations:
// the procedural mock and the HTTP client of a remote backend.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  virtual absl::StatusOr<BackendCapabilities> Capabilities() = 0;

  // Tunes a generator on reference segments of one role. `role` is a role
  // key ("t", "t2", "b"); `description` is the role's request text.
  virtual absl::StatusOr<std::string> FineTune(
      const std::string& role, const std::string& description,
      const std::vector<imaging::RasterImage>& references,
      const Json& config) = 0;

  virtual absl::StatusOr<GeneratedImage> Generate(const std::string& model_ref,
                                                  const std::string& prompt,
                                                  uint64_t seed,
                                                  bool want_alpha, int width,
                                                  int height) = 0;

  // Feature-conditioned generation of `count` images sized like the
  // features.
  virtual absl::StatusOr<std::vector<imaging::RasterImage>> ConditionGenerate(
      const std::vector<imaging::RasterImage>& features,
      const std::string& prompt, uint64_t seed, int count) = 0;

  // Repaints the pixels under `mask`; the rest of `canvas` is kept.
  virtual absl::StatusOr<imaging::RasterImage> Inpaint(
      const std::string& model_ref, const imaging::RasterImage& canvas,
      const imaging::BitMask& mask, const std::string& prompt,
      uint64_t seed) = 0;
};

// Fine-tuning hyperparameters passed through to the backend untouched:
// learning_rate 2e-6, special_token, prior_loss_weight 0.01,
// gradient_accumulation_steps 2, max_train_steps 800.
Json DefaultFineTuneConfig();

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_GENERATION_BACKEND_H_
