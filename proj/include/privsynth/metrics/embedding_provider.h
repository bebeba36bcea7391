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

#ifndef PRIVSYNTH_METRICS_EMBEDDING_PROVIDER_H_
#define PRIVSYNTH_METRICS_EMBEDDING_PROVIDER_H_

#include <string>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/metrics/embedding.h"

namespace privsynth::metrics {

// Joint image/text embedder. Text and image vectors of one provider share a
// space, so prompts can be compared against images.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual absl::StatusOr<EmbeddingVector> EmbedImage(
      const imaging::RasterImage& image) = 0;
  // The empty string yields the prompt-similarity baseline.
  virtual absl::StatusOr<EmbeddingVector> EmbedText(const std::string& text) = 0;
};

}  // namespace privsynth::metrics

#endif  // PRIVSYNTH_METRICS_EMBEDDING_PROVIDER_H_
