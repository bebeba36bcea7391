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

#ifndef PRIVSYNTH_MOCK_BACKENDS_H_
#define PRIVSYNTH_MOCK_BACKENDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/metrics/embedding_provider.h"
#include "privsynth/mock/world.h"
#include "privsynth/orchestrator/generation_backend.h"
#include "privsynth/sanitizer/services.h"
#include "privsynth/utility/evaluate.h"

// Deterministic stand-ins for the learned models behind the backend
// protocol. Model refs are self-describing, so the backends hold no state
// and any instance (or process) can serve any ref.
namespace privsynth::mock {

inline constexpr char kGenerationProvider[] = "mock-procedural-v1";
inline constexpr char kEmbeddingProvider[] = "mock-embed-v1";

// Reference statistics a mock fine-tune captures.
struct StyleModel {
  std::string role;
  std::string description;
  Rgb mean{0, 0, 0};
  Rgb stddev{0, 0, 0};
  // Dominant quantized colors with their weights (sum 1).
  std::vector<std::pair<Rgb, double>> palette;
};

std::string EncodeStyleRef(const StyleModel& model);
absl::StatusOr<StyleModel> DecodeStyleRef(const std::string& model_ref);

// Generation: procedural texture keyed by (prompt, seed), tinted by the
// prompt's concept color. Tuned models pull 70% of every pixel toward the
// references' statistics. Targets come with a blob alpha.
class MockGenerationBackend : public orchestrator::GenerationBackend {
 public:
  absl::StatusOr<orchestrator::BackendCapabilities> Capabilities() override;
  absl::StatusOr<std::string> FineTune(
      const std::string& role, const std::string& description,
      const std::vector<imaging::RasterImage>& references,
      const Json& config) override;
  absl::StatusOr<orchestrator::GeneratedImage> Generate(
      const std::string& model_ref, const std::string& prompt, uint64_t seed,
      bool want_alpha, int width, int height) override;
  absl::StatusOr<std::vector<imaging::RasterImage>> ConditionGenerate(
      const std::vector<imaging::RasterImage>& features,
      const std::string& prompt, uint64_t seed, int count) override;
  absl::StatusOr<imaging::RasterImage> Inpaint(
      const std::string& model_ref, const imaging::RasterImage& canvas,
      const imaging::BitMask& mask, const std::string& prompt,
      uint64_t seed) override;
};

// Weight of the reference statistics in a tuned model's output.
inline constexpr double kStyleWeight = 0.7;

// Embeddings: 4x4x4 RGB histogram of the non-black pixels. Text is embedded
// as the histogram of a texture in the text's concept color; the empty
// prompt maps to the flat histogram.
class MockEmbeddingProvider : public metrics::EmbeddingProvider {
 public:
  absl::StatusOr<metrics::EmbeddingVector> EmbedImage(
      const imaging::RasterImage& image) override;
  absl::StatusOr<metrics::EmbeddingVector> EmbedText(
      const std::string& text) override;
};

inline constexpr int kHistogramBins = 64;

// Normalized 4x4x4 RGB histogram over the non-black pixels.
std::vector<double> ColorHistogram(const imaging::RasterImage& image);

// Training: classification is nearest class mean over color histograms;
// detection learns a mean color per class and the background, then reports
// connected components of class-colored pixels. Epoch e of E fits on the
// first ceil(e/E * n) training samples of a fixed shuffle.
class MockTrainingBackend : public utility::TrainingBackend {
 public:
  absl::StatusOr<utility::TrainingRun> Train(
      const orchestrator::SyntheticDataset& train,
      const orchestrator::SyntheticDataset& validation,
      const Json& config) override;
  absl::StatusOr<std::vector<utility::Prediction>> Predict(
      const std::string& model_ref,
      const std::vector<imaging::RasterImage>& images) override;
};

// Pose: a stick figure over the segment's tight box. Layout box: the box
// outline. Both Gray8, 255 on 0.
class MockFeatureService : public sanitizer::FeatureService {
 public:
  absl::StatusOr<imaging::RasterImage> ExtractFeature(
      const imaging::RasterImage& segment,
      sanitizer::FeatureKind kind) override;
};

// Separates pixels far from the border color (Otsu threshold on color
// distance) and hands the largest components to the targets in order.
class MockSegmentationService : public sanitizer::SegmentationService {
 public:
  absl::StatusOr<sanitizer::ManifestEntry> Segment(
      const imaging::RasterImage& image,
      const std::vector<std::string>& target_descriptions) override;
};

}  // namespace privsynth::mock

#endif  // PRIVSYNTH_MOCK_BACKENDS_H_
