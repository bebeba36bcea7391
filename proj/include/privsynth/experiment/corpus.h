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

#ifndef PRIVSYNTH_EXPERIMENT_CORPUS_H_
#define PRIVSYNTH_EXPERIMENT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::experiment {

// Procedural stand-in for a user's private photos: textured rooms with a
// textured blob as the target. The target's color mixes a per-corpus
// identity color with the color the mock world assigns to the label class,
// so classes are learnable and the identity is what raw sharing leaks.
struct CorpusOptions {
  sanitizer::TaskKind task = sanitizer::TaskKind::kClassification;
  int reference_images = 20;
  // Classification: per class. Detection: total.
  int test_images = 25;
  int width = 64;
  int height = 64;
  uint64_t seed = 0;
};

struct Corpus {
  sanitizer::UserRequest request;
  std::vector<sanitizer::ReferenceImage> images;
  sanitizer::SegmentationManifest manifest;
  // Labeled held-out photos for utility evaluation.
  orchestrator::SyntheticDataset test_set;
};

// Dog-status classification (4 classes) or pill-bottle detection.
sanitizer::UserRequest CorpusRequest(sanitizer::TaskKind task);

absl::StatusOr<Corpus> MakeCorpus(const CorpusOptions& options);

// Layout: request.json, images/<name>.png, manifest.json (+ masks/), test/.
absl::Status WriteCorpus(const Corpus& corpus, const std::filesystem::path& dir);
absl::StatusOr<Corpus> ReadCorpus(const std::filesystem::path& dir);

absl::StatusOr<sanitizer::UserRequest> ReadRequestFile(
    const std::filesystem::path& path);

}  // namespace privsynth::experiment

#endif  // PRIVSYNTH_EXPERIMENT_CORPUS_H_
